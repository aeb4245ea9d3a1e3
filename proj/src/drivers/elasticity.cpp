#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace cartfe {

using namespace drivers;

namespace {

// Affine field used by the patch test.
Value affine_displacement(std::span<const double> x) {
  static const double a[3][3] = {{1e-3, 2e-3, -5e-4}, {-1e-3, 5e-4, 2.5e-3}, {3e-4, -2e-3, 1.5e-3}};
  static const double b[3] = {1e-3, -2e-3, 5e-4};
  const int d = static_cast<int>(x.size());
  Value u = Value::zero(ValueShape::vector(d));
  for (int i = 0; i < d; ++i) {
    u[i] = b[i];
    for (int j = 0; j < d; ++j) u[i] += a[i][j] * x[static_cast<std::size_t>(j)];
  }
  return u;
}

}  // namespace

// Bar (0,1) x (0,1/4) x (0,1/4): full clamp on x1 = 0 ("surface_2"), axial
// displacement delta on x1 = 1 ("surface_1", first component only).
Summary run_elasticity(const DriverConfig& cfg) {
  const int order = pick_positive(cfg.order, 1);
  const int degree = pick(cfg.degree, 2 * order);
  ModelPtr model;
  if (!cfg.mesh.empty()) {
    model = read_model(cfg.mesh);
  } else {
    const int n = pick_positive(cfg.n, 16);
    const int m = std::max(1, n / 4);
    model = cartesian_model({0.0, 1.0, 0.0, 0.25, 0.0, 0.25}, {n, m, m});
  }
  const int d = model->dim();
  auto labels = with_sides(model->labeling(), d, "surface_1", {{0, 1}});
  labels = with_sides(labels, d, "surface_2", {{0, 0}});
  model = model->with_labeling(labels);

  SpaceOptions opts;
  std::vector<PointFn> gs;
  if (cfg.patch_test) {
    opts.dirichlet_tags = {"boundary"};
    gs.push_back(affine_displacement);
  } else {
    std::vector<bool> x_only(static_cast<std::size_t>(d), false), all(static_cast<std::size_t>(d), true);
    x_only[0] = true;
    opts.dirichlet_tags = {"surface_1", "surface_2"};
    opts.dirichlet_masks = {x_only, all};
    const double delta = cfg.delta;
    gs.push_back([delta, d](std::span<const double>) {
      Value v = Value::zero(ValueShape::vector(d));
      v[0] = delta;
      return v;
    });
    gs.push_back([d](std::span<const double>) { return Value::zero(ValueShape::vector(d)); });
  }
  const auto V = test_space(model, Family::QLagrangian, order, ValueShape::vector(d), Conformity::H1, opts);
  const auto U = trial_space(V, gs);

  const auto [lambda, mu] = lame_parameters(cfg.young, cfg.poisson_ratio);
  const Law sigma = make_law("sigma", [lambda, mu](const Value& e) {
    return lambda * trace(e) * Value::identity(e.shape().dim) + 2.0 * mu * e;
  });
  const auto omega = triangulation(model);
  const Measure dOmega(omega, degree);
  const auto op = assemble_affine(
      U, V, {linear_term([sigma](const Fields& u, const Fields& v) { return inner(eps(v), sigma(eps(u))); }, dOmega)},
      {cfg.threads});

  Summary s;
  s.add("driver", std::string("elasticity"));
  s.add("lambda", lambda);
  s.add("mu", mu);
  // Relative to the largest entry; the moduli make entries O(1e10).
  const double amax = norm_inf(op.matrix().val);
  s.add("matrix_asymmetry", amax > 0.0 ? op.matrix().asymmetry() / amax : 0.0);
  const auto x = solve_checked(op, cfg, s);
  const FEFunction uh = op.fields(x)[0];
  const CellField uhf = fe_field(uh);
  const CellField sig = sigma(eps(uhf));
  s.add("sigma_asymmetry_l2", l2_norm(sig - transpose(sig), dOmega));
  double ux = 0.0;
  for (std::size_t k = 0; k < uh.free_values.size(); ++k) ux = std::max(ux, std::abs(uh.free_values[k]));
  s.add("max_free_displacement", ux);
  if (cfg.patch_test) {
    const double err = l2_norm(uhf - function_field(affine_displacement), dOmega);
    s.add("patch_error_l2", err);
    require(err < 1e-10, "elasticity patch test error " + sci(err));
  }
  if (!cfg.out.empty())
    write_vtk(omega, path(cfg, ".vtk"), {{"uh", uhf}, {"epsi", eps(uhf)}, {"sigma", sig}});
  finish(cfg, s);
  return s;
}

}  // namespace cartfe
