#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "cartfe/errors.hpp"
#include "cartfe/postprocess.hpp"

using namespace cartfe;

TEST(Norms, CoordinateFieldOnUnitSquare) {
  // e = x1: int e^2 = 1/3, int |grad e|^2 = 1.
  const auto m = cartesian_model({0, 1, 0, 1}, {3, 3});
  const CellField e = function_field([](std::span<const double> x) { return Value(x[0]); },
                                     [](std::span<const double>) { return Value::vector({1.0, 0.0}); });
  const auto n = error_norms(e, Measure(triangulation(m), 2));
  EXPECT_NEAR(n.el2, std::sqrt(1.0 / 3.0), 1e-14);
  EXPECT_NEAR(n.eh1, std::sqrt(4.0 / 3.0), 1e-14);
  EXPECT_NEAR(l2_norm(e, Measure(triangulation(m), 2)), std::sqrt(1.0 / 3.0), 1e-14);
}

TEST(Norms, VectorFieldNorms) {
  const auto m = cartesian_model({0, 2, 0, 1}, {2, 2});
  const CellField c = constant(Value::vector({3.0, 4.0}));
  const auto n = error_norms(c, Measure(triangulation(m), 0));
  EXPECT_NEAR(n.el2, 5.0 * std::sqrt(2.0), 1e-13);
  EXPECT_NEAR(n.eh1, n.el2, 1e-13);
}

TEST(Slopes, PowerLawSlopeIsExponent) {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> y;
  for (double x : h) y.push_back(7.0 * x * x);
  EXPECT_NEAR(loglog_slope(h, y), 2.0, 1e-13);
  ConvergenceRecord r;
  for (double x : h) r.samples.push_back({x, 3 * x * x * x, 0.1 * x});
  const auto s = convergence_slopes(r);
  EXPECT_NEAR(s.l2, 3.0, 1e-13);
  EXPECT_NEAR(s.h1, 1.0, 1e-13);
}

TEST(Slopes, RejectsTooFewOrUnorderedSamples) {
  EXPECT_THROW(loglog_slope({0.5, 0.25}, {1, 2}), InvalidArgument);
  EXPECT_THROW(loglog_slope({0.5, 0.25, 0.1}, {1, 2}), InvalidArgument);
  ConvergenceRecord r;
  r.samples = {{0.1, 1, 1}, {0.2, 1, 1}, {0.05, 1, 1}};
  EXPECT_THROW(convergence_slopes(r), InvalidArgument);
}

TEST(Vtk, RoundTripOfScalarAndVectorFields) {
  const auto m = cartesian_model({0, 1, 0, 2}, {2, 3});
  const auto omega = triangulation(m);
  const CellField s = function_field([](std::span<const double> x) { return Value(x[0] + 10 * x[1]); });
  const std::string path = ::testing::TempDir() + "/roundtrip.vtk";
  write_vtk(omega, path, {{"s", s}, {"x", physical_coordinate()}});
  const auto d = read_vtk(path);
  ASSERT_EQ(d.cells.size(), 6u);
  ASSERT_EQ(d.points.size(), 6u * 4u * 3u);
  for (int t : d.cell_types) EXPECT_EQ(t, 9);
  ASSERT_EQ(d.components.at("x"), 3);
  const auto& sv = d.arrays.at("s");
  const auto& xv = d.arrays.at("x");
  for (std::size_t p = 0; p < 24; ++p) {
    const double x = d.points[3 * p], y = d.points[3 * p + 1];
    EXPECT_EQ(sv[p], x + 10 * y);
    EXPECT_EQ(xv[3 * p], x);
    EXPECT_EQ(xv[3 * p + 1], y);
    EXPECT_EQ(xv[3 * p + 2], 0.0);
  }
  std::remove(path.c_str());
}

TEST(Vtk, FacetDomainsAndTensorFields) {
  const auto m = cartesian_model({0, 1, 0, 1, 0, 1}, {2, 1, 1});
  const std::string path = ::testing::TempDir() + "/skeleton.vtk";
  const auto skel = skeleton_triangulation(m);
  write_vtk(skel, path, {{"n", get_normal_vector(skel)}});
  const auto d = read_vtk(path);
  ASSERT_EQ(d.cells.size(), 1u);
  EXPECT_EQ(d.cell_types[0], 9);
  EXPECT_EQ(d.arrays.at("n")[0], 1.0);
  write_vtk(triangulation(m), path, {{"I", identity_tensor(3)}});
  const auto t = read_vtk(path);
  EXPECT_EQ(t.cell_types[0], 12);
  EXPECT_EQ(t.components.at("I"), 9);
  EXPECT_EQ(t.arrays.at("I")[4], 1.0);
  std::remove(path.c_str());
}

TEST(Vtk, UnwritablePathRaisesIoError) {
  const auto m = cartesian_model({0, 1}, {2});
  EXPECT_THROW(write_vtk(triangulation(m), "/nonexistent/dir/out.vtk", {}), IoError);
  EXPECT_THROW(read_vtk("/nonexistent/dir/out.vtk"), IoError);
}
