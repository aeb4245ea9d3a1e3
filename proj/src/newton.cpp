#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include "cartfe/errors.hpp"
#include "cartfe/solvers.hpp"

namespace cartfe {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

void trace_line(const NewtonOptions& o, const NewtonStep& s) {
  if (!o.trace) return;
  char buf[128];
  std::snprintf(buf, sizeof buf, "iter %3d  |r|_inf = %.6e  |r|_2 = %.6e  alpha = %.4g", s.iter, s.res_inf, s.res_2,
                s.alpha);
  (o.trace_stream ? *o.trace_stream : std::cout) << buf << '\n';
}

}  // namespace

NewtonResult solve_newton(const NonlinearOperator& op, std::vector<double> x0, const NewtonOptions& o) {
  CARTFE_THROW_IF(static_cast<int>(x0.size()) != op.size(), InvalidArgument, "initial guess size mismatch");
  NewtonResult res;
  res.x = std::move(x0);
  std::vector<double> r = op.residual(res.x);
  double alpha = 0.0;
  for (int it = 0;; ++it) {
    const NewtonStep step{it, norm_inf(r), norm_2(r), alpha};
    res.log.push_back(step);
    trace_line(o, step);
    if (step.res_inf < o.tol) return res;
    if (it == o.max_iters) {
      throw IterationLimitError("Newton did not converge in " + std::to_string(o.max_iters) +
                                " iterations (|r|_inf = " + sci(step.res_inf) + ")");
    }
    std::vector<double> minus_r(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) minus_r[i] = -r[i];
    const auto delta = solve_linear(op.jacobian(res.x), minus_r, o.linear);
    const double r2 = step.res_2 * step.res_2;
    alpha = 1.0;
    std::vector<double> trial(res.x.size()), r_new;
    for (int bt = 0;; ++bt) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = res.x[i] + alpha * delta[i];
      r_new = op.residual(trial);
      const double n2 = norm_2(r_new);
      if (n2 * n2 <= (1.0 - 2.0 * o.armijo_c * alpha) * r2) break;
      if (bt == o.max_backtracks) {
        throw LineSearchError("line search failed after " + std::to_string(o.max_backtracks) +
                              " backtracks (|r|_inf = " + sci(step.res_inf) + ")");
      }
      alpha *= o.shrink;
    }
    res.x = std::move(trial);
    r = std::move(r_new);
    res.iterations = it + 1;
  }
}

std::vector<double> random_vector(int n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = dist(gen);
  return v;
}

}  // namespace cartfe
