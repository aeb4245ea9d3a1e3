#include "cartfe/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "cartfe/errors.hpp"

namespace cartfe {

namespace {

std::size_t next_rule_id() {
  static std::atomic<std::size_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  CARTFE_THROW_IF(n < 1, InvalidArgument, "Gauss-Legendre needs at least one point");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  // Newton iteration on P_n starting from the Chebyshev-like guess; the
  // roots come out descending on [-1,1], mapped here to ascending on [0,1].
  // P_n(t) and P_n'(t) by the three-term recurrence.
  auto legendre = [n](double t, double& dp) {
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    return p1;
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dt = legendre(t, dp) / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    legendre(t, dp);
    const double wt = 2.0 / ((1.0 - t * t) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = 0.5 * (1.0 - t);
    x[hi] = 0.5 * (1.0 + t);
    w[lo] = 0.5 * wt;
    w[hi] = 0.5 * wt;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.5;
}

QuadratureRule gauss_rule(int dim, int degree) {
  CARTFE_THROW_IF(degree < 0, InvalidArgument, "quadrature degree must be >= 0");
  CARTFE_THROW_IF(dim < 0 || dim > 4, InvalidArgument, "quadrature dimension must be in 0..4");
  QuadratureRule r;
  r.dim = dim;
  r.degree = degree;
  r.id = next_rule_id();
  if (dim == 0) {
    r.weights = {1.0};
    return r;
  }
  const int n = (degree + 2) / 2;  // ceil((degree+1)/2)
  std::vector<double> x, w;
  gauss_legendre_01(n, x, w);
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= n;
  r.points.resize(static_cast<std::size_t>(total * dim));
  r.weights.resize(static_cast<std::size_t>(total));
  for (int q = 0; q < total; ++q) {
    int rem = q;
    double wq = 1.0;
    for (int a = 0; a < dim; ++a) {
      const auto i = static_cast<std::size_t>(rem % n);
      rem /= n;
      r.points[static_cast<std::size_t>(q * dim + a)] = x[i];
      wq *= w[i];
    }
    r.weights[static_cast<std::size_t>(q)] = wq;
  }
  return r;
}

QuadratureRule facet_rule(const QuadratureRule& lower, int axis, int side) {
  const int d = lower.dim + 1;
  CARTFE_THROW_IF(axis < 0 || axis >= d || side < 0 || side > 1, InvalidArgument, "invalid facet");
  QuadratureRule r;
  r.dim = d;
  r.degree = lower.degree;
  r.id = next_rule_id();
  r.weights = lower.weights;
  r.points.resize(static_cast<std::size_t>(lower.size() * d));
  for (int q = 0; q < lower.size(); ++q) {
    int k = 0;
    for (int a = 0; a < d; ++a) {
      r.points[static_cast<std::size_t>(q * d + a)] =
          (a == axis) ? static_cast<double>(side) : lower.points[static_cast<std::size_t>(q * lower.dim + k++)];
    }
  }
  return r;
}

QuadratureRule vertex_rule(int dim) {
  CARTFE_THROW_IF(dim < 0 || dim > 4, InvalidArgument, "vertex rule dimension must be in 0..4");
  QuadratureRule r;
  r.dim = dim;
  r.id = next_rule_id();
  const int n = 1 << dim;
  for (int v = 0; v < n; ++v) {
    for (int a = 0; a < dim; ++a) r.points.push_back(static_cast<double>((v >> a) & 1));
    r.weights.push_back(1.0);
  }
  return r;
}

}  // namespace cartfe
