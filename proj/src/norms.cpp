#include <cmath>

#include "cartfe/errors.hpp"
#include "cartfe/postprocess.hpp"

namespace cartfe {

double l2_norm(const CellField& e, const Measure& m) { return std::sqrt(integrate_sum(inner(e, e), m)); }

ErrorNorms error_norms(const CellField& e, const Measure& m) {
  const CellField g = gradient(e);
  const double l2sq = integrate_sum(inner(e, e), m);
  const double gsq = integrate_sum(inner(g, g), m);
  return {std::sqrt(l2sq), std::sqrt(l2sq + gsq)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  CARTFE_THROW_IF(x.size() != y.size(), InvalidArgument, "slope needs paired samples");
  CARTFE_THROW_IF(x.size() < 3, InvalidArgument, "slope needs at least 3 samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    CARTFE_THROW_IF(!(x[i] > 0.0) || !(y[i] > 0.0), InvalidArgument, "slope needs positive samples");
    const double lx = std::log10(x[i]), ly = std::log10(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  CARTFE_THROW_IF(den == 0.0, InvalidArgument, "slope needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

Slopes convergence_slopes(const ConvergenceRecord& r) {
  std::vector<double> h, e0, e1;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    if (i > 0) CARTFE_THROW_IF(!(r.samples[i].h < r.samples[i - 1].h), InvalidArgument, "h must decrease strictly");
    h.push_back(r.samples[i].h);
    e0.push_back(r.samples[i].el2);
    e1.push_back(r.samples[i].eh1);
  }
  return {loglog_slope(h, e0), loglog_slope(h, e1)};
}

}  // namespace cartfe
