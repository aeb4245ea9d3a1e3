#pragma once

// Data-parallel inner loops used by assembly and the iterative solver.
//
// Each kernel has a scalar reference implementation (namespace `scalar`) and,
// on x86-64, an AVX2/FMA variant (namespace `avx2`). The unqualified entry
// points dispatch through a table chosen once at startup from the CPU feature
// bits; `CARTFE_ISA=scalar` in the environment or `force_isa()` pins the
// reference path. The SIMD variants reassociate sums, so they agree with the
// reference to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace cartfe::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when the binary carries the AVX2 unit and the CPU can execute it.
bool avx2_available() noexcept;

Isa active_isa() noexcept;

/// Select the kernel table. Requesting Avx2 on a machine without it throws
/// InvalidArgument.
void force_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out[i*ldo + j] += sum_k a[i*m + k] * w[k] * b[j*m + k]
///
/// `a` holds `ni` rows of length `m`, `b` holds `nj` rows of length `m`.
/// This is the elemental bilinear-form contraction: rows are basis functions,
/// k runs over (quadrature point, value component) and w carries the
/// quadrature weight times the measure.
void weighted_gram(std::span<const double> a, std::size_t ni, std::span<const double> b,
                   std::size_t nj, std::span<const double> w, std::size_t m,
                   std::span<double> out, std::size_t ldo);

/// sum_k vals[k] * x[cols[k]]
double gather_dot(std::span<const double> vals, std::span<const int> cols,
                  std::span<const double> x);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void weighted_gram(const double* a, std::size_t ni, const double* b, std::size_t nj,
                   const double* w, std::size_t m, double* out, std::size_t ldo);
double gather_dot(const double* vals, const int* cols, const double* x, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void weighted_gram(const double* a, std::size_t ni, const double* b, std::size_t nj,
                   const double* w, std::size_t m, double* out, std::size_t ldo);
double gather_dot(const double* vals, const int* cols, const double* x, std::size_t n);
}  // namespace avx2
#endif

}  // namespace cartfe::simd
