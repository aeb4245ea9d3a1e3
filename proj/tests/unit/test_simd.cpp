#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "cartfe/errors.hpp"
#include "cartfe/simd/kernels.hpp"

using namespace cartfe;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Lengths straddle the 4-wide vector body and its remainder loop.
const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 101};

}  // namespace

TEST(Simd, ScalarDotMatchesNaiveLoop) {
  const auto a = random_values(37, 1), b = random_values(37, 2);
  double ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ref += a[i] * b[i];
  EXPECT_DOUBLE_EQ(simd::scalar::dot(a.data(), b.data(), a.size()), ref);
}

#if defined(__x86_64__)
TEST(Simd, Avx2KernelsAgreeWithScalarReference) {
  if (!simd::avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  for (std::size_t n : kLengths) {
    const auto a = random_values(n, 3), b = random_values(n, 4);
    EXPECT_NEAR(simd::avx2::dot(a.data(), b.data(), n), simd::scalar::dot(a.data(), b.data(), n), 1e-13) << n;

    auto y1 = random_values(n, 5), y2 = y1;
    simd::scalar::axpy(0.7, a.data(), y1.data(), n);
    simd::avx2::axpy(0.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);

    std::vector<int> cols(n);
    std::mt19937 rng(6);
    for (auto& c : cols) c = static_cast<int>(rng() % 50);
    const auto x = random_values(50, 7);
    EXPECT_NEAR(simd::avx2::gather_dot(a.data(), cols.data(), x.data(), n),
                simd::scalar::gather_dot(a.data(), cols.data(), x.data(), n), 1e-13);
  }
}

TEST(Simd, Avx2WeightedGramAgreesWithScalarReference) {
  if (!simd::avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  for (std::size_t m : kLengths) {
    for (std::size_t ni : {1u, 3u, 9u}) {
      const std::size_t nj = ni + 2, ldo = nj + 1;
      const auto a = random_values(ni * m, 8), b = random_values(nj * m, 9), w = random_values(m, 10);
      std::vector<double> o1(ni * ldo, 0.5), o2 = o1;
      simd::scalar::weighted_gram(a.data(), ni, b.data(), nj, w.data(), m, o1.data(), ldo);
      simd::avx2::weighted_gram(a.data(), ni, b.data(), nj, w.data(), m, o2.data(), ldo);
      for (std::size_t k = 0; k < o1.size(); ++k) EXPECT_NEAR(o1[k], o2[k], 1e-13) << "m=" << m << " ni=" << ni;
    }
  }
}
#endif

TEST(Simd, WeightedGramAccumulatesIntoStridedOutput) {
  // a = [[1,2]], b = [[3,4],[5,6]], w = [1,10]: out += [1*3 + 20*4, 1*5 + 20*6]
  const std::vector<double> a{1, 2}, b{3, 4, 5, 6}, w{1, 10};
  std::vector<double> out{1, 1, -7};
  simd::weighted_gram(a, 1, b, 2, w, 2, out, 3);
  EXPECT_DOUBLE_EQ(out[0], 1 + 83);
  EXPECT_DOUBLE_EQ(out[1], 1 + 125);
  EXPECT_DOUBLE_EQ(out[2], -7);
}

TEST(Simd, ForcingScalarSelectsReference) {
  const auto before = simd::active_isa();
  simd::force_isa(simd::Isa::Scalar);
  EXPECT_EQ(simd::active_isa(), simd::Isa::Scalar);
  EXPECT_EQ(simd::isa_name(simd::Isa::Scalar), "scalar");
  simd::force_isa(before);
}

TEST(Simd, ForcingUnavailableIsaThrows) {
  if (simd::avx2_available()) GTEST_SKIP() << "AVX2 present";
  EXPECT_THROW(simd::force_isa(simd::Isa::Avx2), InvalidArgument);
}
