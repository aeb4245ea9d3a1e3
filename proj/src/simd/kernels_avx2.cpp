#include "cartfe/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <vector>

namespace cartfe::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), s1);
  }
  for (; k + 4 <= n; k += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void weighted_gram(const double* a, std::size_t ni, const double* b, std::size_t nj,
                   const double* w, std::size_t m, double* out, std::size_t ldo) {
  // Fold the weights into one row of `a` at a time, then each entry is a dot.
  thread_local std::vector<double> aw;
  aw.resize(m);
  for (std::size_t i = 0; i < ni; ++i) {
    const double* ai = a + i * m;
    std::size_t k = 0;
    for (; k + 4 <= m; k += 4) {
      _mm256_storeu_pd(aw.data() + k, _mm256_mul_pd(_mm256_loadu_pd(ai + k), _mm256_loadu_pd(w + k)));
    }
    for (; k < m; ++k) aw[k] = ai[k] * w[k];
    double* oi = out + i * ldo;
    for (std::size_t j = 0; j < nj; ++j) oi[j] += dot(aw.data(), b + j * m, m);
  }
}

double gather_dot(const double* vals, const int* cols, const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
    __m256d xv = _mm256_i32gather_pd(x, idx, 8);
    s = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, s);
  }
  double r = hsum(s);
  for (; k < n; ++k) r += vals[k] * x[cols[k]];
  return r;
}

}  // namespace cartfe::simd::avx2

#endif
