#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace cartfe {

using namespace drivers;

// Cartesian analog of the first tutorial: Dirichlet g on the x1 = 0 and
// x1 = 1 sides ("sides"), Neumann h on the upper side of the last axis,
// homogeneous Neumann elsewhere, source f.
Summary run_poisson(const DriverConfig& cfg) {
  const int order = pick_positive(cfg.order, 1);
  const int degree = pick(cfg.degree, 2 * order);
  ModelPtr model = load_or_box(cfg, pick_positive(cfg.dim, 3), pick_positive(cfg.n, 8));
  const int d = model->dim();
  model = model->with_labeling(with_sides(model->labeling(), d, "sides", {{0, 0}, {0, 1}}));

  SpaceOptions opts;
  opts.dirichlet_tags = {cfg.full_dirichlet ? TagRef("boundary") : TagRef("sides")};
  const auto V = test_space(model, Family::QLagrangian, order, ValueShape::scalar(), Conformity::H1, opts);
  const double g = cfg.g, f = cfg.f, h = cfg.h;
  const auto U = trial_space(V, [g](std::span<const double>) { return Value(g); });

  const auto omega = triangulation(model);
  std::vector<Term> terms;
  terms.push_back(affine_term([](const Fields& u, const Fields& v) { return inner(grad(v), grad(u)); },
                              [f](const Fields& v) { return CellField(v) * f; }, Measure(omega, degree)));
  if (!cfg.full_dirichlet && h != 0.0) {
    const auto gamma_n = boundary_triangulation(model, {TagRef(box_side_entity(d, d - 1, 1))});
    terms.push_back(source_term([h](const Fields& v) { return CellField(v) * h; }, Measure(gamma_n, degree)));
  }
  const auto op = assemble_affine(U, V, terms, {cfg.threads});

  Summary s;
  s.add("driver", std::string("poisson"));
  s.add("dim", d);
  s.add("order", order);
  const auto x = solve_checked(op, cfg, s);
  const FEFunction uh = op.fields(x)[0];
  double umax = -INFINITY, umin = INFINITY;
  for (double v : uh.free_values) umax = std::max(umax, v), umin = std::min(umin, v);
  for (double v : uh.constrained_values) umax = std::max(umax, v), umin = std::min(umin, v);
  s.add("uh_max", umax);
  s.add("uh_min", umin);
  if (!cfg.out.empty()) write_vtk(omega, path(cfg, ".vtk"), {{"uh", fe_field(uh)}});
  finish(cfg, s);
  return s;
}

ErrorNorms manufactured_poisson(int n, int order, const std::string& solution, int degree, const LinearSolver& solver) {
  CARTFE_THROW_IF(solution != "sin" && solution != "linear", InvalidArgument,
                  "unknown manufactured solution '" + solution + "' (sin | linear)");
  const double k = 2.0 * M_PI;
  PointFn u, gu, f;
  if (solution == "sin") {
    u = [k](std::span<const double> x) { return Value(std::sin(k * x[0]) * x[1]); };
    gu = [k](std::span<const double> x) { return Value::vector({k * std::cos(k * x[0]) * x[1], std::sin(k * x[0])}); };
    f = [k](std::span<const double> x) { return Value(k * k * std::sin(k * x[0]) * x[1]); };
  } else {
    u = [](std::span<const double> x) { return Value(x[0] + x[1]); };
    gu = [](std::span<const double>) { return Value::vector({1.0, 1.0}); };
    f = [](std::span<const double>) { return Value(0.0); };
  }
  const auto model = cartesian_model({0.0, 1.0, 0.0, 1.0}, {n, n});
  SpaceOptions opts;
  opts.dirichlet_tags = {"boundary"};
  const auto V = test_space(model, Family::QLagrangian, order, ValueShape::scalar(), Conformity::H1, opts);
  const auto U = trial_space(V, u);
  const Measure dOmega(triangulation(model), degree >= 0 ? degree : 2 * order);
  const CellField fc = function_field(f);
  const auto op = assemble_affine(
      U, V,
      {affine_term([](const Fields& uu, const Fields& v) { return inner(grad(v), grad(uu)); },
                   [fc](const Fields& v) { return CellField(v) * fc; }, dOmega)});
  const auto x = solve_linear(op.matrix(), op.rhs(), solver);
  const CellField e = function_field(u, gu) - fe_field(op.fields(x)[0]);
  return error_norms(e, dOmega);
}

ConvergenceRecord convergence_study(const std::vector<int>& ns, int order, const std::string& solution) {
  CARTFE_THROW_IF(ns.size() < 3, InvalidArgument, "a convergence study needs at least 3 meshes");
  ConvergenceRecord rec;
  rec.order = order;
  for (int n : ns) {
    const auto e = manufactured_poisson(n, order, solution);
    rec.samples.push_back({1.0 / n, e.el2, e.eh1});
  }
  return rec;
}

Summary run_convergence(const DriverConfig& cfg) {
  const int order = pick_positive(cfg.order, 2);
  const std::vector<int> ns = cfg.ns.empty() ? std::vector<int>{8, 16, 32, 64} : cfg.ns;
  const auto rec = convergence_study(ns, order, cfg.solution);
  Summary s;
  s.add("driver", std::string("convergence"));
  s.add("order", order);
  s.add("solution", cfg.solution);
  for (const auto& smp : rec.samples) {
    const std::string n = std::to_string(static_cast<int>(std::lround(1.0 / smp.h)));
    s.add("el2_n" + n, smp.el2);
    s.add("eh1_n" + n, smp.eh1);
  }
  if (cfg.solution == "sin") {
    const auto sl = convergence_slopes(rec);
    s.add("slope_l2", sl.l2);
    s.add("slope_h1", sl.h1);
  }
  finish(cfg, s);
  if (!cfg.out.empty()) {
    std::FILE* fp = std::fopen(path(cfg, ".table").c_str(), "w");
    if (!fp) throw IoError("cannot write convergence table");
    std::fprintf(fp, "h el2 eh1\n");
    for (const auto& smp : rec.samples) std::fprintf(fp, "%.17g %.17g %.17g\n", smp.h, smp.el2, smp.eh1);
    std::fclose(fp);
  }
  return s;
}

}  // namespace cartfe
