#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace cartfe {

using namespace drivers;

// Mixed Darcy on the unit square: RT flux with u.n = 0 on bottom/top (tags
// 5, 6), discontinuous Q_k pressure, Neumann datum on the right side (tag 8).
Summary run_darcy(const DriverConfig& cfg) {
  const int k = pick(cfg.order, 0);
  const int n = pick_positive(cfg.n, cfg.paper_scale ? 100 : 32);
  const int degree = pick(cfg.degree, std::max(2, 2 * (k + 1)));
  const double tol = pick(cfg.tol, 1e-10);
  const ModelPtr model = load_or_box(cfg, 2, n);
  CARTFE_THROW_IF(model->dim() != 2, InvalidArgument, "the Darcy driver runs in 2D");

  SpaceOptions vopts;
  vopts.dirichlet_tags = {5, 6};
  const auto V = test_space(model, Family::RaviartThomas, k, ValueShape::vector(2), Conformity::HDiv, vopts);
  const auto Q = test_space(model, Family::QLagrangian, k, ValueShape::scalar(), Conformity::L2);
  const MultiFieldSpace Y(std::vector<TrialPtr>{trial_space(V), trial_space(Q)});
  const MultiFieldSpace& X = Y;

  const auto omega = triangulation(model);
  const auto gamma_n = boundary_triangulation(model, {8});
  const Measure dOmega(omega, degree), dN(gamma_n, degree);

  const double k2[4] = {100.0, 90.0, 90.0, 100.0};
  const Value kinv1 = Value::identity(2);
  const Value kinv2 = Value::from_components(ValueShape::tensor(2), k2);
  const bool homogeneous = cfg.homogeneous;
  const Law sigma = make_law("sigma", [=](const Value& x, const Value& u) {
    const bool inclusion = std::abs(x[0] - 0.5) <= 0.1 && std::abs(x[1] - 0.5) <= 0.1;
    return (inclusion && !homogeneous ? kinv2 : kinv1) * u;
  });
  const CellField px = physical_coordinate();
  const CellField nb = get_normal_vector(gamma_n);
  const double h = -1.0;

  const auto op = assemble_affine(
      X, Y,
      {linear_term(
           [=](const Fields& x, const Fields& y) {
             const CellField &u = x[0], &p = x[1], &v = y[0], &q = y[1];
             return v * sigma(px, u) - divergence(v) * p + q * divergence(u);
           },
           dOmega),
       source_term([=](const Fields& y) { return (y[0] * nb) * h; }, dN)},
      {cfg.threads});

  Summary s;
  s.add("driver", std::string("darcy"));
  s.add("n", n);
  s.add("order", k);
  s.add_bool("homogeneous", homogeneous);
  const auto x = solve_checked(op, cfg, s);
  const auto fields = op.fields(x);
  const CellField uh = fe_field(fields[0]), ph = fe_field(fields[1]);

  // Normal flux left on the flux-Dirichlet sides.
  const auto gamma_d = boundary_triangulation(model, {5, 6});
  const Measure dD(gamma_d, degree);
  const CellField un = uh * get_normal_vector(gamma_d);
  Workspace ws;
  double flux_max = 0.0;
  for (int it = 0; it < gamma_d->num_items(); ++it) {
    const auto ctx = make_context(dD, it, ws);
    const FieldBlock b = evaluate(un, ctx);
    for (int q = 0; q < ctx.npts; ++q) flux_max = std::max(flux_max, std::abs(b.at(0, 0, q)[0]));
  }
  s.add("flux_bc_max", flux_max);
  require(flux_max == 0.0, "flux Dirichlet constraint violated by " + sci(flux_max));

  if (homogeneous) {
    // kappa = I: u = (-1, 0), p = x1 solve the problem exactly.
    const CellField u_exact = constant(Value::vector({-1.0, 0.0}));
    const CellField p_exact = function_field([](std::span<const double> y) { return Value(y[0]); });
    const double eu = l2_norm(uh - u_exact, dOmega);
    s.add("u_el2", eu);
    require(eu < tol, "flux L2 error " + sci(eu));
    if (k >= 1) {
      const double ep = l2_norm(ph - p_exact, dOmega);
      s.add("p_el2", ep);
      require(ep < tol, "pressure L2 error " + sci(ep));
    } else {
      // Q0 cannot hold x1; the discrete pressure is its cell mean instead.
      const auto diff = integrate(ph - p_exact, dOmega);
      const auto vol = integrate(CellField(1.0), dOmega);
      double ep = 0.0;
      for (std::size_t c = 0; c < diff.size(); ++c) ep = std::max(ep, std::abs(diff[c]) / vol[c]);
      s.add("p_cell_mean_error", ep);
      require(ep < tol, "pressure cell-mean error " + sci(ep));
    }
  }
  if (!cfg.out.empty()) write_vtk(omega, path(cfg, ".vtk"), {{"uh", uh}, {"ph", ph}});
  finish(cfg, s);
  return s;
}

}  // namespace cartfe
