#include "cartfe/simd/kernels.hpp"

namespace cartfe::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void weighted_gram(const double* a, std::size_t ni, const double* b, std::size_t nj,
                   const double* w, std::size_t m, double* out, std::size_t ldo) {
  for (std::size_t i = 0; i < ni; ++i) {
    const double* ai = a + i * m;
    for (std::size_t j = 0; j < nj; ++j) {
      const double* bj = b + j * m;
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += ai[k] * w[k] * bj[k];
      out[i * ldo + j] += s;
    }
  }
}

double gather_dot(const double* vals, const int* cols, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += vals[k] * x[cols[k]];
  return s;
}

}  // namespace cartfe::simd::scalar
