#pragma once

// Independent reference computations the unit tests compare against.

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

/// Dense Gaussian elimination with partial pivoting, row-major n x n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    if (a[p * n + k] == 0.0) throw std::runtime_error("singular");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= l * a[k * n + j];
      b[i] -= l * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * b[j];
    b[k] = s / a[k * n + k];
  }
  return b;
}

/// Sparse-ish random matrix: diagonal dominance controlled by `shift`.
inline std::vector<double> random_sparse(std::size_t n, double density, double shift, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.0, 1.0);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i == j || p(rng) < density) a[i * n + j] = u(rng);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += shift;
  return a;
}

/// Q^T diag(d) Q with eigenvalues log-spaced in [1, cond], Q from
/// Householder reflections (SPD, condition number = cond).
inline std::vector<double> random_spd(std::size_t n, double cond, std::mt19937& rng) {
  std::normal_distribution<double> g;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    a[i * n + i] = n > 1 ? std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1)) : 1.0;
  for (int r = 0; r < 3; ++r) {
    std::vector<double> v(n);
    double nv = 0.0;
    for (auto& x : v) {
      x = g(rng);
      nv += x * x;
    }
    for (auto& x : v) x /= std::sqrt(nv);
    // A <- H A H with H = I - 2 v v^T.
    std::vector<double> av(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) av[i] += a[i * n + j] * v[j];
    double vav = 0.0;
    for (std::size_t i = 0; i < n; ++i) vav += v[i] * av[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] += -2.0 * v[i] * av[j] - 2.0 * av[i] * v[j] + 4.0 * vav * v[i] * v[j];
  }
  return a;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

/// Exact integral of prod_a x_a^{e_a} over [0,1]^d.
inline double monomial_integral(const std::vector<int>& e) {
  double r = 1.0;
  for (int k : e) r /= (k + 1);
  return r;
}

}  // namespace oracle
