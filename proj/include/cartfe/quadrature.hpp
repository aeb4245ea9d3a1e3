#pragma once

#include <span>
#include <vector>

namespace cartfe {

/// Points in [0,1]^dim (row-major, dim values per point) with positive weights
/// summing to 1.
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
  /// Distinct id per constructed rule; evaluation caches key on it.
  std::size_t id = 0;

  int size() const noexcept { return static_cast<int>(weights.size()); }
  std::span<const double> point(int q) const {
    return std::span<const double>(points).subspan(static_cast<std::size_t>(q * dim), static_cast<std::size_t>(dim));
  }
};

/// Gauss-Legendre nodes/weights on [0,1], ascending.
void gauss_legendre_01(int npoints, std::vector<double>& x, std::vector<double>& w);

/// Tensor-product Gauss-Legendre rule with ceil((degree+1)/2) points per
/// axis, first axis fastest. dim = 0 gives the single point rule.
QuadratureRule gauss_rule(int dim, int degree);

/// Embed a (dim-1)-dimensional rule onto a facet of the reference cube:
/// coordinate `side` is inserted at position `axis`.
QuadratureRule facet_rule(const QuadratureRule& lower, int axis, int side);

/// The 2^dim corners of [0,1]^dim in lexicographic order (unit weights);
/// used for sampling, not integration.
QuadratureRule vertex_rule(int dim);

}  // namespace cartfe
