#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cartfe/drivers.hpp"
#include "cartfe/errors.hpp"
#include "cartfe/solvers.hpp"
#include "oracles.hpp"

using namespace cartfe;

namespace {

std::vector<double> rhs_for(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> b(n);
  for (auto& x : b) x = u(rng);
  return b;
}

double relative_error(const std::vector<double>& x, const std::vector<double>& ref) {
  return oracle::max_abs_diff(x, ref) / std::max(oracle::max_abs(ref), 1e-300);
}

int bandwidth(const CsrMatrix& a, const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
  int bw = 0;
  for (int i = 0; i < a.nrows; ++i)
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      bw = std::max(bw, std::abs(inv[static_cast<std::size_t>(i)] - inv[static_cast<std::size_t>(a.col[static_cast<std::size_t>(k)])]));
  return bw;
}

}  // namespace

TEST(Sparse, CooBuilderSumsDuplicates) {
  CooBuilder b(3, 3);
  b.add(0, 0, 1.0);
  b.add(2, 1, 4.0);
  b.add(0, 0, 2.0);
  b.add(1, 2, -1.0);
  const auto a = b.finalize();
  EXPECT_EQ(a.nnz(), 3);
  EXPECT_EQ(a.at(0, 0), 3.0);
  EXPECT_EQ(a.at(2, 1), 4.0);
  EXPECT_EQ(a.at(1, 1), 0.0);
  const auto t = a.transpose();
  EXPECT_EQ(t.at(1, 2), 4.0);
  EXPECT_EQ(a.asymmetry(), 5.0);  // |4 - (-1)|
  EXPECT_EQ(CsrMatrix::from_dense(3, 3, a.to_dense()).val, a.val);
}

TEST(SparseLU, TwoByTwoSystem) {
  const auto a = CsrMatrix::from_dense(2, 2, std::vector<double>{2, 1, 1, 3});
  const auto x = SparseLU(a).solve(std::vector<double>{3, 5});
  EXPECT_NEAR(x[0], 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(x[1], 7.0 / 5.0, 1e-15);
}

TEST(SparseLU, NeedsPivotingForZeroDiagonal) {
  const auto a = CsrMatrix::from_dense(3, 3, std::vector<double>{0, 1, 0, 1, 0, 0, 0, 0, 2});
  for (auto o : {Ordering::Natural, Ordering::ReverseCuthillMcKee}) {
    const auto x = SparseLU(a, o).solve(std::vector<double>{1, 2, 4});
    EXPECT_NEAR(x[0], 2.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
    EXPECT_NEAR(x[2], 2.0, 1e-15);
  }
}

TEST(SparseLU, SingularMatrixIsReported) {
  const auto a = CsrMatrix::from_dense(3, 3, std::vector<double>{1, 2, 0, 2, 4, 0, 0, 0, 1});
  EXPECT_THROW(SparseLU lu(a), SingularSystemError);
  try {
    SparseLU lu(a, Ordering::Natural);
    FAIL();
  } catch (const SingularSystemError& e) {
    EXPECT_GE(e.pivot(), 0);
  }
}

// Random unsymmetric systems up to 200 unknowns against dense elimination.
TEST(SparseLU, MatchesDenseOracleOnRandomSystems) {
  std::mt19937 rng(99);
  for (std::size_t n : {1u, 2u, 5u, 17u, 60u, 131u, 200u}) {
    for (auto o : {Ordering::Natural, Ordering::ReverseCuthillMcKee}) {
      const auto dense = oracle::random_sparse(n, 0.05, 0.5, rng);
      const auto a = CsrMatrix::from_dense(static_cast<int>(n), static_cast<int>(n), dense);
      const auto b = rhs_for(n, static_cast<unsigned>(n));
      EXPECT_LT(relative_error(SparseLU(a, o).solve(b), oracle::dense_solve(dense, b)), 1e-8) << n;
    }
  }
}

TEST(SparseLU, MatchesDenseOracleOnIllConditionedSpd) {
  std::mt19937 rng(7);
  for (std::size_t n : {10u, 50u, 200u}) {
    const auto dense = oracle::random_spd(n, 1e6, rng);
    const auto a = CsrMatrix::from_dense(static_cast<int>(n), static_cast<int>(n), dense);
    const auto b = rhs_for(n, 5);
    EXPECT_LT(relative_error(SparseLU(a).solve(b), oracle::dense_solve(dense, b)), 1e-8) << n;
  }
}

TEST(Rcm, IsAPermutationThatRecoversBandStructure) {
  // A tridiagonal matrix under a random symmetric permutation.
  const int n = 60;
  std::vector<int> shuffle(n);
  std::iota(shuffle.begin(), shuffle.end(), 0);
  std::shuffle(shuffle.begin(), shuffle.end(), std::mt19937(3));
  CooBuilder b(n, n);
  for (int i = 0; i < n; ++i) {
    b.add(shuffle[static_cast<std::size_t>(i)], shuffle[static_cast<std::size_t>(i)], 4.0);
    if (i + 1 < n) {
      b.add(shuffle[static_cast<std::size_t>(i)], shuffle[static_cast<std::size_t>(i + 1)], -1.0);
      b.add(shuffle[static_cast<std::size_t>(i + 1)], shuffle[static_cast<std::size_t>(i)], -1.0);
    }
  }
  const auto a = b.finalize();
  const auto perm = rcm_ordering(a);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < n; ++k) EXPECT_EQ(sorted[static_cast<std::size_t>(k)], k);
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_GT(bandwidth(a, identity), 1);
  EXPECT_EQ(bandwidth(a, perm), 1);
}

TEST(ConjugateGradient, AgreesWithLuOnSpd) {
  std::mt19937 rng(11);
  const std::size_t n = 80;
  const auto dense = oracle::random_spd(n, 1e3, rng);
  const auto a = CsrMatrix::from_dense(static_cast<int>(n), static_cast<int>(n), dense);
  const auto b = rhs_for(n, 12);
  const auto r = conjugate_gradient(a, b);
  EXPECT_LT(r.residual, 1e-12);
  EXPECT_LT(relative_error(r.x, SparseLU(a).solve(b)), 1e-8);
  EXPECT_LT(relative_error(solve_linear(a, b, LinearSolver::conjugate_gradient()), r.x), 1e-14);
}

TEST(ConjugateGradient, RefusesNonSymmetricOrIndefiniteDiagonal) {
  EXPECT_THROW(conjugate_gradient(CsrMatrix::from_dense(2, 2, std::vector<double>{2, 1, 0, 2}), std::vector<double>{1, 1}), PreconditionError);
  EXPECT_THROW(conjugate_gradient(CsrMatrix::from_dense(2, 2, std::vector<double>{1, 0, 0, -1}), std::vector<double>{1, 1}), PreconditionError);
}

TEST(ConjugateGradient, RefusesTheDarcySaddlePointSystem) {
  // The mixed system has a zero pressure block (and q div u is
  // skew-coupled), so CG must decline while LU solves it.
  const auto m = cartesian_model({0, 1, 0, 1}, {4, 4});
  SpaceOptions o;
  o.dirichlet_tags = {5, 6};
  const auto V = test_space(m, Family::RaviartThomas, 0, ValueShape::vector(2), Conformity::HDiv, o);
  const auto Q = test_space(m, Family::QLagrangian, 0, ValueShape::scalar(), Conformity::L2);
  const MultiFieldSpace X(std::vector<TrialPtr>{trial_space(V), trial_space(Q)});
  const auto op = assemble_affine(
      X, X,
      {linear_term([](const Fields& x, const Fields& y) {
         return y[0] * x[0] - divergence(y[0]) * x[1] + y[1] * divergence(x[0]);
       }, Measure(triangulation(m), 2)),
       source_term([](const Fields& y) { return CellField(y[1]) * 1.0; }, Measure(triangulation(m), 2))});
  EXPECT_THROW(conjugate_gradient(op.matrix(), op.rhs()), PreconditionError);
  const auto x = solve_linear(op.matrix(), op.rhs());
  const auto r = op.matrix() * x;
  EXPECT_LT(oracle::max_abs_diff(r, op.rhs()), 1e-12);
}

TEST(Newton, RandomVectorIsSeededAndUniform) {
  const auto a = random_vector(100, 1234), b = random_vector(100, 1234), c = random_vector(100, 1);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (double x : a) {
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Newton, PlaplacianLinearCaseConvergesInOneStep) {
  DriverConfig cfg;
  cfg.p = 2.0;
  cfg.n = 6;
  const auto s = run_plaplacian(cfg);
  EXPECT_LE(s.number("newton_iterations"), 2);
  EXPECT_LT(s.number("residual_inf"), 1e-8);
}

TEST(Newton, IterationCapRaisesWithLastResidual) {
  DriverConfig cfg;
  cfg.n = 6;
  cfg.max_iters = 1;
  try {
    run_plaplacian(cfg);
    FAIL() << "expected IterationLimitError";
  } catch (const IterationLimitError& e) {
    EXPECT_NE(std::string(e.what()).find("|r|"), std::string::npos) << e.what();
  }
}

TEST(Newton, TraceStreamReceivesOneLinePerIterate) {
  const auto m = cartesian_model({0, 1, 0, 1}, {4, 4});
  SpaceOptions o;
  o.dirichlet_tags = {"boundary"};
  const auto v = test_space(m, Family::QLagrangian, 1, ValueShape::scalar(), Conformity::H1, o);
  // u + u^3 = 1 pointwise in a weak sense: a mild nonlinearity.
  const Law cube = make_law("cube", [](const Value& u) { return u * u * u; });
  const Law dcube = make_law("dcube", [](const Value& du, const Value& u) { return 3.0 * u * u * du; });
  const NonlinearOperator op(
      trial_space(v), v,
      {nonlinear_term([=](const Fields& u, const Fields& w) {
                        return inner(grad(w), grad(u)) + CellField(w) * cube(u) - CellField(w) * 1.0;
                      },
                      [=](const Fields& u, const Fields& du, const Fields& w) {
                        return inner(grad(w), grad(du)) + CellField(w) * dcube(du, u);
                      },
                      Measure(triangulation(m), 4))});
  std::ostringstream os;
  NewtonOptions no;
  no.trace = true;
  no.trace_stream = &os;
  const auto r = solve_newton(op, random_vector(op.size()), no);
  EXPECT_LT(r.log.back().res_inf, 1e-8);
  EXPECT_EQ(static_cast<int>(r.log.size()), r.iterations + 1);
  const auto text = os.str();
  EXPECT_EQ(static_cast<int>(std::count(text.begin(), text.end(), '\n')), r.iterations + 1);
  EXPECT_LT(jacobian_fd_error(op, random_vector(op.size(), 5)), 1e-5);
}
