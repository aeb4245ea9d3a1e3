#include <cmath>
#include <fstream>
#include <iostream>

#include "common.hpp"

namespace cartfe {

using namespace drivers;

// Unit square (or the mesh file): u = 0 on x1 = 0 ("diri0"), u = g on
// x1 = 1 ("dirig"), homogeneous Neumann elsewhere, source f.
Summary run_plaplacian(const DriverConfig& cfg) {
  const int order = pick_positive(cfg.order, 1);
  const int degree = pick(cfg.degree, 2 * order);
  const double p = cfg.p;
  CARTFE_THROW_IF(p < 2.0, InvalidArgument, "p-Laplacian needs p >= 2");
  ModelPtr model = load_or_box(cfg, pick_positive(cfg.dim, 2), pick_positive(cfg.n, 16));
  const int d = model->dim();
  auto labels = with_sides(model->labeling(), d, "diri0", {{0, 0}});
  labels = with_sides(labels, d, "dirig", {{0, 1}});
  model = model->with_labeling(labels);

  SpaceOptions opts;
  opts.dirichlet_tags = {"diri0", "dirig"};
  const auto V = test_space(model, Family::QLagrangian, order, ValueShape::scalar(), Conformity::H1, opts);
  const double g = cfg.g, f = cfg.f;
  const auto U = trial_space(V, {[](std::span<const double>) { return Value(0.0); },
                                 [g](std::span<const double>) { return Value(g); }});

  const Law flux = make_law("flux", [p](const Value& gu) { return std::pow(norm(gu), p - 2) * gu; });
  const Law dflux = make_law("dflux", [p](const Value& gdu, const Value& gu) {
    const double n = norm(gu);
    // (p-2)|gu|^(p-4)(gu.gdu) gu vanishes with gu for p >= 2.
    const double c = n > 0.0 ? (p - 2) * std::pow(n, p - 4) * inner(gu, gdu) : 0.0;
    return c * gu + std::pow(n, p - 2) * gdu;
  });
  const Measure dOmega(triangulation(model), degree);
  const NonlinearOperator op(
      U, V,
      {nonlinear_term([flux, f](const Fields& u, const Fields& v) { return inner(grad(v), flux(grad(u))) - CellField(v) * f; },
                      [dflux](const Fields& u, const Fields& du, const Fields& v) {
                        return inner(grad(v), dflux(grad(du), grad(u)));
                      },
                      dOmega)},
      {cfg.threads});

  std::vector<double> x0 = cfg.zero_guess ? std::vector<double>(static_cast<std::size_t>(op.size()), 0.0)
                                          : random_vector(op.size(), cfg.seed);
  Summary s;
  s.add("driver", std::string("plaplacian"));
  s.add("p", p);
  s.add("num_free_dofs", op.size());
  s.add("seed", static_cast<int>(cfg.seed));
  if (cfg.check_jacobian) {
    const double err = jacobian_fd_error(op, x0);
    s.add("jacobian_fd_error", err);
    require(err < 1e-5, "analytic Jacobian differs from finite differences by " + sci(err));
  }
  NewtonOptions no;
  no.linear = linear_solver(cfg);
  no.tol = pick(cfg.tol, 1e-8);
  no.max_iters = pick(cfg.max_iters, 20);
  no.trace = cfg.trace;
  const auto res = solve_newton(op, std::move(x0), no);
  s.add("newton_iterations", res.iterations);
  s.add("residual_inf", res.log.back().res_inf);
  const FEFunction uh = op.fields(res.x)[0];
  if (!cfg.out.empty()) {
    write_vtk(dOmega.domain(), path(cfg, ".vtk"), {{"uh", fe_field(uh)}});
    std::ofstream(path(cfg, ".log")) << format_log(res.log);
  }
  finish(cfg, s);
  return s;
}

}  // namespace cartfe
