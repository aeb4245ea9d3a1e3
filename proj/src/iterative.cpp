#include <cmath>

#include "cartfe/errors.hpp"
#include "cartfe/simd/kernels.hpp"
#include "cartfe/solvers.hpp"

namespace cartfe {

namespace {
std::size_t sz(int i) { return static_cast<std::size_t>(i); }
}  // namespace

CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b, CgOptions options) {
  CARTFE_THROW_IF(a.nrows != a.ncols || b.size() != sz(a.nrows), InvalidArgument, "CG size mismatch");
  const int n = a.nrows;
  double amax = 0.0;
  for (double v : a.val) amax = std::max(amax, std::abs(v));
  if (a.asymmetry() > 1e-10 * amax) throw PreconditionError("conjugate gradients needs a symmetric matrix");
  const auto diag = a.diagonal();
  for (int i = 0; i < n; ++i)
    if (!(diag[sz(i)] > 0.0)) {
      throw PreconditionError("conjugate gradients needs a positive diagonal (row " + std::to_string(i) + ")");
    }

  CgResult res;
  res.x.assign(sz(n), 0.0);
  const double bnorm = norm_2(b);
  if (bnorm == 0.0) return res;
  std::vector<double> r(b.begin(), b.end()), z(sz(n)), p(sz(n)), ap(sz(n));
  for (int i = 0; i < n; ++i) z[sz(i)] = r[sz(i)] / diag[sz(i)];
  p = z;
  double rz = simd::dot(r, z);
  for (int it = 1; it <= options.max_iters; ++it) {
    a.multiply(p, ap);
    const double pap = simd::dot(p, ap);
    if (!(pap > 0.0)) throw PreconditionError("matrix is not positive definite (p^T A p <= 0)");
    const double alpha = rz / pap;
    simd::axpy(alpha, p, res.x);
    simd::axpy(-alpha, ap, r);
    res.iterations = it;
    res.residual = norm_2(r) / bnorm;
    if (res.residual <= options.rtol) return res;
    for (int i = 0; i < n; ++i) z[sz(i)] = r[sz(i)] / diag[sz(i)];
    const double rz_new = simd::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[sz(i)] = z[sz(i)] + beta * p[sz(i)];
  }
  throw IterationLimitError("conjugate gradients did not converge in " + std::to_string(options.max_iters) +
                            " iterations (relative residual " + std::to_string(res.residual) + ")");
}

std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b, const LinearSolver& solver) {
  if (solver.kind == LinearSolver::Kind::CG) return conjugate_gradient(a, b, solver.cg).x;
  return SparseLU(a, solver.ordering).solve(b);
}

}  // namespace cartfe
