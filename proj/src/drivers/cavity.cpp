#include <cmath>
#include <fstream>
#include <optional>

#include "common.hpp"

namespace cartfe {

using namespace drivers;

namespace {

struct CavitySolve {
  NonlinearOperator op;
  NewtonResult result;
};

CavitySolve solve_cavity(const MultiFieldSpace& X, const MultiFieldSpace& Y, const ModelPtr& model, double re,
                         int degree, const DriverConfig& cfg) {
  const Law conv = make_law("conv", [re](const Value& u, const Value& gu) { return re * (gu * u); });
  // Basis-dependent arguments pair by basis index: du with grad(du).
  const Law dconv = make_law("dconv", [re](const Value& du, const Value& gdu, const Value& u, const Value& gu) {
    return re * (gdu * u) + re * (gu * du);
  });
  const auto a = [](const Fields& x, const Fields& y) {
    const CellField &u = x[0], &p = x[1], &v = y[0], &q = y[1];
    return inner(grad(v), grad(u)) - divergence(v) * p + q * divergence(u);
  };
  const Measure dOmega(triangulation(model), degree);
  NonlinearOperator op(
      X, Y,
      {nonlinear_term(
          [=](const Fields& x, const Fields& y) { return a(x, y) + y[0] * conv(x[0], grad(x[0])); },
          [=](const Fields& x, const Fields& dx, const Fields& y) {
            return a(dx, y) + y[0] * dconv(dx[0], grad(dx[0]), x[0], grad(x[0]));
          },
          dOmega)},
      {cfg.threads});
  NewtonOptions no;
  no.linear = linear_solver(cfg);
  no.tol = pick(cfg.tol, 1e-8);
  no.max_iters = pick(cfg.max_iters, 20);
  no.trace = cfg.trace;
  // The reference run starts from zero.
  auto res = solve_newton(op, std::vector<double>(static_cast<std::size_t>(op.size()), 0.0), no);
  return {std::move(op), std::move(res)};
}

}  // namespace

// Lid-driven cavity on the unit square: Q_k velocity, discontinuous zero-mean
// P_{k-1} pressure, u = (1, 0) on the lid (tag 6) and 0 elsewhere.
Summary run_cavity(const DriverConfig& cfg) {
  const int order = pick_positive(cfg.order, 2);
  CARTFE_THROW_IF(order < 2, InvalidArgument, "the cavity pair needs velocity order >= 2");
  const double re = cfg.reynolds;
  ModelPtr model = load_or_box(cfg, 2, pick_positive(cfg.n, 32));
  CARTFE_THROW_IF(model->dim() != 2, InvalidArgument, "the cavity driver runs in 2D");
  auto labels = add_tag_from_tags(model->labeling(), "diri1", {6});
  labels = add_tag_from_tags(labels, "diri0", {1, 2, 3, 4, 5, 7, 8});
  model = model->with_labeling(labels);

  SpaceOptions vopts;
  vopts.dirichlet_tags = {"diri0", "diri1"};
  const auto V = test_space(model, Family::QLagrangian, order, ValueShape::vector(2), Conformity::H1, vopts);
  SpaceOptions qopts;
  qopts.constraint = Constraint::ZeroMean;
  const auto Q = test_space(model, Family::PLagrangian, order - 1, ValueShape::scalar(), Conformity::L2, qopts);
  const auto U = trial_space(V, {[](std::span<const double>) { return Value::vector({0.0, 0.0}); },
                                 [](std::span<const double>) { return Value::vector({1.0, 0.0}); }});
  const MultiFieldSpace Y(std::vector<TrialPtr>{trial_space(V), trial_space(Q)});
  const MultiFieldSpace X(std::vector<TrialPtr>{U, trial_space(Q)});

  Summary s;
  s.add("driver", std::string("cavity"));
  s.add("reynolds", re);
  s.add("num_cells", model->num_cells());
  s.add("order", order);

  // Degree 2(k-1) under-integrates the viscous term for Q_k; keep the
  // reference choice and fall back to 2k only if the solve breaks down.
  int degree = pick(cfg.degree, (order - 1) * 2);
  bool fallback = false;
  std::optional<CavitySolve> sol;
  try {
    sol.emplace(solve_cavity(X, Y, model, re, degree, cfg));
  } catch (const Error& e) {
    if (cfg.degree >= 0) throw;
    s.add("degree_fallback_reason", std::string(e.what()));
    fallback = true;
    degree = 2 * order;
    sol.emplace(solve_cavity(X, Y, model, re, degree, cfg));
  }
  s.add("degree", degree);
  s.add_bool("degree_fallback", fallback);
  s.add("num_free_dofs", sol->op.size());
  s.add("newton_iterations", sol->result.iterations);
  s.add("residual_inf", sol->result.log.back().res_inf);

  const auto fields = sol->op.fields(sol->result.x);
  const FEFunction& uh = fields[0];
  const FEFunction ph = zero_mean_postshift(fields[1]);
  const double pmean = integrate_function(ph);
  s.add("pressure_integral", pmean);
  require(std::abs(pmean) < 1e-12, "pressure integral " + sci(pmean));

  // Lid dofs carry exactly (1, 0); corners belong to diri0.
  int lid = 0;
  double lid_err = 0.0;
  for (int k = 0; k < V->num_constrained(); ++k) {
    if (V->constrained_tag(k) != 1) continue;
    const int local = V->constrained_location(k).second;
    const int comp = V->reffe()->dofs()[static_cast<std::size_t>(local)].component;
    lid_err = std::max(lid_err, std::abs(uh.constrained_values[static_cast<std::size_t>(k)] - (comp == 0 ? 1.0 : 0.0)));
    ++lid;
  }
  s.add("lid_dofs", lid);
  s.add("lid_error", lid_err);
  require(lid > 0 && lid_err == 0.0, "lid velocity dofs differ from (1,0)");

  const Measure dOmega(triangulation(model), 2 * order);
  s.add("div_l2", l2_norm(divergence(fe_field(uh)), dOmega));
  if (!cfg.out.empty()) {
    write_vtk(dOmega.domain(), path(cfg, ".vtk"), {{"uh", fe_field(uh)}, {"ph", fe_field(ph)}});
    std::ofstream(path(cfg, ".log")) << format_log(sol->result.log);
  }
  finish(cfg, s);
  return s;
}

}  // namespace cartfe
