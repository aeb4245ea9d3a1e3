#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cartfe/errors.hpp"
#include "cartfe/simd/kernels.hpp"

namespace cartfe::simd {
namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*weighted_gram)(const double*, std::size_t, const double*, std::size_t, const double*,
                        std::size_t, double*, std::size_t);
  double (*gather_dot)(const double*, const int*, const double*, std::size_t);
};

constexpr KernelTable kScalar{Isa::Scalar, scalar::dot, scalar::axpy, scalar::weighted_gram,
                              scalar::gather_dot};

#if defined(CARTFE_HAVE_AVX2_TU)
constexpr KernelTable kAvx2{Isa::Avx2, avx2::dot, avx2::axpy, avx2::weighted_gram,
                            avx2::gather_dot};
#endif

bool cpu_has_avx2() noexcept {
#if defined(CARTFE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() noexcept {
  const char* env = std::getenv("CARTFE_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
#if defined(CARTFE_HAVE_AVX2_TU)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& table() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

inline const KernelTable& k() { return *table().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() noexcept { return cpu_has_avx2(); }

Isa active_isa() noexcept { return k().isa; }

void force_isa(Isa isa) {
  if (isa == Isa::Scalar) {
    table().store(&kScalar);
    return;
  }
#if defined(CARTFE_HAVE_AVX2_TU)
  if (cpu_has_avx2()) {
    table().store(&kAvx2);
    return;
  }
#endif
  throw InvalidArgument("AVX2 kernels are not available on this machine");
}

double dot(std::span<const double> a, std::span<const double> b) {
  CARTFE_THROW_IF(a.size() != b.size(), InvalidArgument, "dot: length mismatch");
  return k().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  CARTFE_THROW_IF(x.size() != y.size(), InvalidArgument, "axpy: length mismatch");
  k().axpy(alpha, x.data(), y.data(), x.size());
}

void weighted_gram(std::span<const double> a, std::size_t ni, std::span<const double> b,
                   std::size_t nj, std::span<const double> w, std::size_t m,
                   std::span<double> out, std::size_t ldo) {
  CARTFE_THROW_IF(a.size() < ni * m || b.size() < nj * m || w.size() < m, InvalidArgument,
                  "weighted_gram: operand too short");
  CARTFE_THROW_IF(ni > 0 && (nj > ldo || out.size() < (ni - 1) * ldo + nj), InvalidArgument,
                  "weighted_gram: output too short");
  k().weighted_gram(a.data(), ni, b.data(), nj, w.data(), m, out.data(), ldo);
}

double gather_dot(std::span<const double> vals, std::span<const int> cols,
                  std::span<const double> x) {
  CARTFE_THROW_IF(vals.size() != cols.size(), InvalidArgument, "gather_dot: length mismatch");
  return k().gather_dot(vals.data(), cols.data(), x.data(), vals.size());
}

}  // namespace cartfe::simd
