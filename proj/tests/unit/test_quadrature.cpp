#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cartfe/quadrature.hpp"
#include "oracles.hpp"

using namespace cartfe;

TEST(Quadrature, GaussLegendreNodesAscendingAndSymmetric) {
  std::vector<double> x, w;
  for (int n = 1; n <= 10; ++n) {
    gauss_legendre_01(n, x, w);
    ASSERT_EQ(static_cast<int>(x.size()), n);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-15);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(x[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(n - 1 - i)], 1.0, 1e-15);
      EXPECT_GT(w[static_cast<std::size_t>(i)], 0.0);
      if (i > 0) {
        EXPECT_LT(x[static_cast<std::size_t>(i - 1)], x[static_cast<std::size_t>(i)]);
      }
    }
  }
}

// Every monomial with per-axis exponent <= degree integrates to 1e-13.
TEST(Quadrature, TensorRuleExactToDeclaredDegree) {
  for (int d = 1; d <= 3; ++d) {
    for (int deg = 0; deg <= 9; ++deg) {
      const auto r = gauss_rule(d, deg);
      EXPECT_EQ(r.dim, d);
      EXPECT_GE(r.degree, deg);
      std::vector<int> e(static_cast<std::size_t>(d), 0);
      while (true) {
        double q = 0.0;
        for (int k = 0; k < r.size(); ++k) {
          double v = r.weights[static_cast<std::size_t>(k)];
          for (int a = 0; a < d; ++a) v *= std::pow(r.point(k)[static_cast<std::size_t>(a)], e[static_cast<std::size_t>(a)]);
          q += v;
        }
        EXPECT_NEAR(q, oracle::monomial_integral(e), 1e-13) << "d=" << d << " deg=" << deg;
        int a = 0;
        while (a < d && ++e[static_cast<std::size_t>(a)] > deg) e[static_cast<std::size_t>(a++)] = 0;
        if (a == d) break;
      }
    }
  }
}

TEST(Quadrature, PointCountIsMinimal) {
  EXPECT_EQ(gauss_rule(2, 0).size(), 1);
  EXPECT_EQ(gauss_rule(2, 1).size(), 1);
  EXPECT_EQ(gauss_rule(2, 2).size(), 4);
  EXPECT_EQ(gauss_rule(3, 6).size(), 64);
  EXPECT_EQ(gauss_rule(0, 5).size(), 1);
}

TEST(Quadrature, OneDegreeBeyondIsNotExact) {
  // Degree 3 uses 2 points; x^4 is no longer integrated exactly.
  const auto r = gauss_rule(1, 3);
  double q = 0.0;
  for (int k = 0; k < r.size(); ++k) q += r.weights[static_cast<std::size_t>(k)] * std::pow(r.point(k)[0], 4);
  EXPECT_GT(std::abs(q - 0.2), 1e-4);
}

TEST(Quadrature, FacetRuleInsertsFixedCoordinate) {
  const auto lower = gauss_rule(1, 3);
  const auto f = facet_rule(lower, 0, 1);
  ASSERT_EQ(f.dim, 2);
  ASSERT_EQ(f.size(), lower.size());
  for (int k = 0; k < f.size(); ++k) {
    EXPECT_EQ(f.point(k)[0], 1.0);
    EXPECT_EQ(f.point(k)[1], lower.point(k)[0]);
  }
  const auto g = facet_rule(lower, 1, 0);
  for (int k = 0; k < g.size(); ++k) EXPECT_EQ(g.point(k)[1], 0.0);
  EXPECT_NE(f.id, g.id);
}

TEST(Quadrature, VertexRuleListsCornersLexicographically) {
  const auto v = vertex_rule(2);
  ASSERT_EQ(v.size(), 4);
  const double expect[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(v.point(k)[0], expect[k][0]);
    EXPECT_EQ(v.point(k)[1], expect[k][1]);
  }
}
