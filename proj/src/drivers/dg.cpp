#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace cartfe {

using namespace drivers;

// Symmetric interior penalty on the unit box with u = 3 x1 + x2 + 2 x3
// (3 x1 + x2 in 2D), f = 0 and g = u on the whole boundary.
Summary run_dg(const DriverConfig& cfg) {
  const int order = pick_positive(cfg.order, 3);
  const int n = pick_positive(cfg.n, 4);
  const int degree = pick(cfg.degree, 2 * order);
  const double tol = pick(cfg.tol, 1e-10);
  const ModelPtr model = load_or_box(cfg, pick_positive(cfg.dim, 3), n);
  const int d = model->dim();
  CARTFE_THROW_IF(d < 2 || d > 3, InvalidArgument, "the DG driver runs in 2D or 3D");

  const double coef[3] = {3.0, 1.0, 2.0};
  const PointFn u = [coef](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) s += coef[a] * x[a];
    return Value(s);
  };
  const PointFn grad_u = [coef](std::span<const double> x) {
    Value g = Value::zero(ValueShape::vector(static_cast<int>(x.size())));
    for (int a = 0; a < static_cast<int>(x.size()); ++a) g[a] = coef[a];
    return g;
  };

  const auto V = test_space(model, Family::QLagrangian, order, ValueShape::scalar(), Conformity::L2);
  const auto U = trial_space(V);
  const auto omega = triangulation(model);
  const auto gamma_b = boundary_triangulation(model);
  const auto lambda = skeleton_triangulation(model);
  const Measure dOmega(omega, degree), dB(gamma_b, degree), dS(lambda, degree);
  const CellField nb = get_normal_vector(gamma_b);
  const CellField ns = get_normal_vector(lambda);
  const CellField g = function_field(u, grad_u);

  // Mesh size as in the reference script: L / n on the unit box.
  const double h = 1.0 / n;
  const double gamma = ip_penalty(order);
  const double f = 0.0;

  std::vector<Term> terms;
  terms.push_back(affine_term([](const Fields& uu, const Fields& v) { return inner(grad(v), grad(uu)); },
                              [f](const Fields& v) { return CellField(v) * f; }, dOmega));
  terms.push_back(affine_term(
      [=](const Fields& uu, const Fields& vv) {
        const CellField& u1 = uu;
        const CellField& v = vv;
        return (gamma / h) * v * u1 - v * (grad(u1) * nb) - (grad(v) * nb) * u1;
      },
      [=](const Fields& vv) {
        const CellField& v = vv;
        return (gamma / h) * v * g - (grad(v) * nb) * g;
      },
      dB));
  terms.push_back(linear_term(
      [=](const Fields& uu, const Fields& vv) {
        const CellField& u1 = uu;
        const CellField& v = vv;
        return (gamma / h) * jump(v * ns) * jump(u1 * ns) - jump(v * ns) * mean(grad(u1)) -
               mean(grad(v)) * jump(u1 * ns);
      },
      dS));
  const auto op = assemble_affine(U, V, terms, {cfg.threads});

  Summary s;
  s.add("driver", std::string("dg"));
  s.add("dim", d);
  s.add("n", n);
  s.add("order", order);
  s.add("gamma", gamma);
  s.add("h", h);
  const auto x = solve_checked(op, cfg, s);
  const FEFunction uh = op.fields(x)[0];
  const CellField uhf = fe_field(uh);
  const auto err = error_norms(g - uhf, dOmega);
  s.add("el2", err.el2);
  s.add("eh1", err.eh1);

  // Largest |jump(uh)| over the skeleton quadrature points.
  const CellField ju = jump(uhf);
  Workspace ws;
  double jmax = 0.0;
  for (int it = 0; it < lambda->num_items(); ++it) {
    const auto ctx = make_context(dS, it, ws);
    const FieldBlock b = evaluate(ju, ctx);
    for (int q = 0; q < ctx.npts; ++q) jmax = std::max(jmax, std::abs(b.at(0, 0, q)[0]));
  }
  s.add("jump_max", jmax);
  if (!cfg.out.empty()) {
    write_vtk(omega, path(cfg, ".vtk"), {{"uh", uhf}, {"e", g - uhf}});
    write_vtk(lambda, path(cfg, "_jumps.vtk"), {{"jump_u", ju}});
  }
  finish(cfg, s);
  require(err.el2 < tol, "DG el2 " + sci(err.el2) + " >= tol " + sci(tol));
  require(err.eh1 < tol, "DG eh1 " + sci(err.eh1) + " >= tol " + sci(tol));
  require(jmax < tol, "DG skeleton jump " + sci(jmax) + " >= tol " + sci(tol));
  return s;
}

}  // namespace cartfe
