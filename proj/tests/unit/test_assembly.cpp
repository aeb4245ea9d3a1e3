#include <gtest/gtest.h>

#include <cmath>

#include "cartfe/drivers.hpp"
#include "cartfe/errors.hpp"
#include "cartfe/operators.hpp"
#include "cartfe/postprocess.hpp"
#include "cartfe/simd/kernels.hpp"
#include "cartfe/solvers.hpp"
#include "oracles.hpp"

using namespace cartfe;

namespace {

ModelPtr square(int n) { return cartesian_model({0, 1, 0, 1}, {n, n}); }

double relative_asymmetry(const CsrMatrix& a) {
  const double amax = norm_inf(a.val);
  return amax > 0 ? a.asymmetry() / amax : 0.0;
}

AffineOperator poisson_operator(const ModelPtr& m, int order, int threads = 1) {
  SpaceOptions o;
  o.dirichlet_tags = {"boundary"};
  const auto v = test_space(m, Family::QLagrangian, order, ValueShape::scalar(), Conformity::H1, o);
  const auto u = trial_space(v, [](std::span<const double> x) { return Value(1 + x[0] * x[1]); });
  const Measure dm(triangulation(m), 2 * order);
  return assemble_affine(u, v,
                         {affine_term([](const Fields& uu, const Fields& vv) { return inner(grad(vv), grad(uu)); },
                                      [](const Fields& vv) { return CellField(vv) * 1.0; }, dm)},
                         {threads});
}

AffineOperator elasticity_operator(const ModelPtr& m) {
  SpaceOptions o;
  o.dirichlet_tags = {7};
  const int d = m->dim();
  const auto v = test_space(m, Family::QLagrangian, 2, ValueShape::vector(d), Conformity::H1, o);
  const double lambda = 1.7, mu = 0.9;
  const Law sigma = make_law("sigma", [=](const Value& e) { return lambda * trace(e) * Value::identity(d) + 2 * mu * e; });
  return assemble_affine(trial_space(v), v,
                         {linear_term([=](const Fields& u, const Fields& vv) { return inner(eps(vv), sigma(eps(u))); },
                                      Measure(triangulation(m), 4))});
}

}  // namespace

TEST(Assembly, PoissonAndElasticityMatricesAreSymmetric) {
  EXPECT_LT(relative_asymmetry(poisson_operator(square(5), 1).matrix()), 1e-12);
  EXPECT_LT(relative_asymmetry(poisson_operator(cartesian_model({0, 1, 0, 2, 0, 1}, {2, 3, 2}), 2).matrix()), 1e-12);
  EXPECT_LT(relative_asymmetry(elasticity_operator(square(3)).matrix()), 1e-12);
  EXPECT_LT(relative_asymmetry(elasticity_operator(cartesian_model({0, 1, 0, 1, 0, 1}, {2, 2, 2})).matrix()), 1e-12);
}

TEST(Assembly, MassMatrixSumsToDomainMeasure) {
  const auto m = cartesian_model({0, 2, 0, 1}, {3, 2});
  const auto v = test_space(m, Family::QLagrangian, 2, ValueShape::scalar(), Conformity::H1);
  const auto op = assemble_affine(
      trial_space(v), v,
      {linear_term([](const Fields& u, const Fields& w) { return CellField(w) * CellField(u); }, Measure(triangulation(m), 4))});
  double s = 0.0;
  for (double x : op.matrix().val) s += x;
  EXPECT_NEAR(s, 2.0, 1e-13);
}

TEST(Assembly, StiffnessRowsSumToZeroWithoutConstraints) {
  const auto m = square(3);
  const auto v = test_space(m, Family::QLagrangian, 2, ValueShape::scalar(), Conformity::H1);
  const auto op = assemble_affine(
      trial_space(v), v,
      {linear_term([](const Fields& u, const Fields& w) { return inner(grad(w), grad(u)); }, Measure(triangulation(m), 4))});
  const std::vector<double> ones(static_cast<std::size_t>(v->num_free()), 1.0);
  EXPECT_LT(oracle::max_abs(op.matrix() * ones), 1e-12);
}

TEST(Assembly, DirichletEliminationMatchesRawSystem) {
  // The eliminated system is the free-free block of the raw matrix, with the
  // constrained columns times the Dirichlet values moved to the right side.
  const auto m = square(3);
  const auto op = poisson_operator(m, 2);
  const auto& trial = op.trial();
  const Measure dm(triangulation(m), 4);
  const auto raw = assemble_raw_matrix(
      trial, op.test(), [](const Fields& u, const Fields& v) { return inner(grad(v), grad(u)); }, dm);
  const auto load = assemble_affine(op.test(), op.test(),
                                    {source_term([](const Fields& v) { return CellField(v) * 1.0; }, dm)});
  const int nf = trial.num_free();
  const auto g = trial.field(0).dirichlet_values();
  ASSERT_EQ(raw.nrows, nf + static_cast<int>(g.size()));
  for (int i = 0; i < nf; ++i) {
    double lifted = load.rhs()[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < g.size(); ++k) lifted -= raw.at(i, nf + static_cast<int>(k)) * g[k];
    EXPECT_NEAR(op.rhs()[static_cast<std::size_t>(i)], lifted, 1e-13);
    for (int j = 0; j < nf; ++j) EXPECT_NEAR(raw.at(i, j), op.matrix().at(i, j), 1e-14);
  }
}

TEST(Assembly, SkeletonPenaltyBlockForPiecewiseConstants) {
  // Two Q0 cells sharing one facet: (gamma/h) int jump(v) jump(u) gives
  // (gamma/h) |F| [[1, -1], [-1, 1]].
  const auto m = cartesian_model({0, 1, 0, 0.5}, {2, 1});
  const auto v = test_space(m, Family::QLagrangian, 0, ValueShape::scalar(), Conformity::L2);
  const auto s = skeleton_triangulation(m);
  const double gamma = 2.0, h = 0.5;
  const auto op = assemble_affine(
      trial_space(v), v,
      {linear_term([=](const Fields& u, const Fields& w) { return (gamma / h) * jump(CellField(w)) * jump(CellField(u)); },
                   Measure(s, 0))});
  const double f = 0.5 * gamma / h;
  EXPECT_NEAR(op.matrix().at(0, 0), f, 1e-15);
  EXPECT_NEAR(op.matrix().at(0, 1), -f, 1e-15);
  EXPECT_NEAR(op.matrix().at(1, 0), -f, 1e-15);
  EXPECT_NEAR(op.matrix().at(1, 1), f, 1e-15);
}

TEST(Assembly, ThreadedAssemblyIsDeterministic) {
  const auto m = square(7);
  const auto a1 = poisson_operator(m, 2, 1);
  const auto a3 = poisson_operator(m, 2, 3);
  EXPECT_EQ(a1.matrix().row_ptr, a3.matrix().row_ptr);
  EXPECT_EQ(a1.matrix().col, a3.matrix().col);
  for (std::size_t k = 0; k < a1.matrix().val.size(); ++k) EXPECT_NEAR(a1.matrix().val[k], a3.matrix().val[k], 1e-14);
  EXPECT_EQ(poisson_operator(m, 2, 3).matrix().val, a3.matrix().val);
  EXPECT_EQ(poisson_operator(m, 2, 1).rhs(), a1.rhs());
}

TEST(Assembly, ScalarAndSimdKernelsGiveTheSameMatrix) {
  if (!simd::avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  const auto before = simd::active_isa();
  const auto m = cartesian_model({0, 1, 0, 1, 0, 1}, {2, 2, 2});
  simd::force_isa(simd::Isa::Scalar);
  const auto a = elasticity_operator(m);
  simd::force_isa(simd::Isa::Avx2);
  const auto b = elasticity_operator(m);
  simd::force_isa(before);
  const double scale = norm_inf(a.matrix().val);
  // Entries that cancel to exactly zero in one variant may survive as
  // rounding noise in the other, so compare values rather than patterns.
  const auto da = a.matrix().to_dense(), db = b.matrix().to_dense();
  EXPECT_LT(oracle::max_abs_diff(da, db), 1e-13 * scale);
}

TEST(Assembly, RightHandSideOnSkeletonIsUnsupported) {
  const auto m = square(2);
  EXPECT_THROW(source_term([](const Fields& v) { return CellField(v); }, Measure(skeleton_triangulation(m), 1)),
               UnsupportedDomainError);
}

TEST(Assembly, MeasureOnAnotherModelIsRejected) {
  const auto v = test_space(square(2), Family::QLagrangian, 1, ValueShape::scalar(), Conformity::H1);
  EXPECT_THROW(assemble_affine(trial_space(v), v,
                               {linear_term([](const Fields& u, const Fields& w) { return CellField(w) * CellField(u); },
                                            Measure(triangulation(square(3)), 2))}),
               DomainError);
}

TEST(Assembly, PoissonPatchTestReproducesLinearField) {
  // f = 0 with linear Dirichlet data: the Q1 solution is the linear field.
  const auto m = cartesian_model({0, 1, 0, 1, 0, 1}, {3, 3, 3});
  SpaceOptions o;
  o.dirichlet_tags = {"boundary"};
  const auto v = test_space(m, Family::QLagrangian, 1, ValueShape::scalar(), Conformity::H1, o);
  const PointFn g = [](std::span<const double> x) { return Value(2 * x[0] - x[1] + 0.5 * x[2] + 1); };
  const auto u = trial_space(v, g);
  const Measure dm(triangulation(m), 2);
  const auto op = assemble_affine(u, v,
                                  {affine_term([](const Fields& uu, const Fields& vv) { return inner(grad(vv), grad(uu)); },
                                               [](const Fields& vv) { return CellField(vv) * 0.0; }, dm)});
  const auto uh = op.fields(solve_linear(op.matrix(), op.rhs()))[0];
  EXPECT_LT(l2_norm(function_field(g) - fe_field(uh), dm), 1e-12);
}

// Stokes and Navier-Stokes on the unit square with u = (x^2, -2xy),
// p = x + y - 1: both lie in the Q2 / P1 spaces, so the discrete solution
// must reproduce them.
class MixedFlow : public ::testing::TestWithParam<double> {};

TEST_P(MixedFlow, ReproducesPolynomialSolution) {
  const double re = GetParam();
  const auto m = square(3);
  SpaceOptions vo;
  vo.dirichlet_tags = {"boundary"};
  const auto V = test_space(m, Family::QLagrangian, 2, ValueShape::vector(2), Conformity::H1, vo);
  SpaceOptions qo;
  qo.constraint = Constraint::ZeroMean;
  const auto Q = test_space(m, Family::PLagrangian, 1, ValueShape::scalar(), Conformity::L2, qo);
  const PointFn u_ex = [](std::span<const double> x) { return Value::vector({x[0] * x[0], -2 * x[0] * x[1]}); };
  const PointFn p_ex = [](std::span<const double> x) { return Value(x[0] + x[1] - 1); };
  // -lap u + Re (grad u) u + grad p
  const PointFn f = [re](std::span<const double> x) {
    const double a = x[0], b = x[1];
    return Value::vector({-2 + 1 + re * 2 * a * a * a, 1 + re * 2 * a * a * b});
  };
  const MultiFieldSpace X(std::vector<TrialPtr>{trial_space(V, u_ex), trial_space(Q)});
  const MultiFieldSpace Y(std::vector<TrialPtr>{trial_space(V), trial_space(Q)});
  const Measure dm(triangulation(m), 8);
  const CellField ff = function_field(f);
  const Law conv = make_law("conv", [re](const Value& u, const Value& gu) { return re * (gu * u); });
  const Law dconv = make_law("dconv", [re](const Value& du, const Value& gdu, const Value& u, const Value& gu) {
    return re * (gdu * u) + re * (gu * du);
  });
  const auto a = [](const Fields& x, const Fields& y) {
    return inner(grad(y[0]), grad(x[0])) - divergence(y[0]) * x[1] + y[1] * divergence(x[0]);
  };
  const NonlinearOperator op(
      X, Y,
      {nonlinear_term([=](const Fields& x, const Fields& y) { return a(x, y) + y[0] * conv(x[0], grad(x[0])) - y[0] * ff; },
                      [=](const Fields& x, const Fields& dx, const Fields& y) {
                        return a(dx, y) + y[0] * dconv(dx[0], grad(dx[0]), x[0], grad(x[0]));
                      },
                      dm)});
  const auto res = solve_newton(op, std::vector<double>(static_cast<std::size_t>(op.size()), 0.0));
  if (re == 0.0) {
    EXPECT_LE(res.iterations, 1);
  }
  const auto fields = op.fields(res.x);
  EXPECT_LT(l2_norm(function_field(u_ex) - fe_field(fields[0]), dm), 1e-10);
  EXPECT_LT(l2_norm(function_field(p_ex) - fe_field(zero_mean_postshift(fields[1])), dm), 1e-10);
  EXPECT_LT(jacobian_fd_error(op, res.x), 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Reynolds, MixedFlow, ::testing::Values(0.0, 10.0));
