#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <set>

#include "cartfe/errors.hpp"
#include "cartfe/geometry.hpp"
#include "cartfe/mesh.hpp"

using namespace cartfe;

TEST(CubeTopology, SquareFaceOrder) {
  const CubeTopology c(2);
  ASSERT_EQ(c.num_faces(0), 4);
  ASSERT_EQ(c.num_faces(1), 4);
  ASSERT_EQ(c.num_faces(2), 1);
  EXPECT_EQ(c.num_faces_total(), 9);
  // Edges: y=0, y=1 extend along x (mask 1), then x=0, x=1 (mask 2).
  EXPECT_EQ(c.face(1, 0).mask, 1u);
  EXPECT_EQ(c.face(1, 0).offset[1], 0);
  EXPECT_EQ(c.face(1, 1).offset[1], 1);
  EXPECT_EQ(c.face(1, 2).mask, 2u);
  EXPECT_EQ(c.face(1, 3).offset[0], 1);
  EXPECT_EQ(c.facet(0, 1), 3);
  EXPECT_EQ(c.facet(1, 0), 0);
  for (int f = 0; f < 4; ++f) EXPECT_EQ(c.facet(c.facet_axis(f), c.facet_side(f)), f);
}

TEST(CubeTopology, FaceCountsFollowBinomialPattern) {
  // A d-cube has C(d,m) 2^(d-m) faces of dimension m; total 3^d.
  for (int d = 1; d <= 4; ++d) {
    const CubeTopology c(d);
    int total = 0;
    for (int m = 0; m <= d; ++m) {
      int binom = 1;
      for (int i = 0; i < m; ++i) binom = binom * (d - i) / (i + 1);
      EXPECT_EQ(c.num_faces(m), binom * (1 << (d - m)));
      total += c.num_faces(m);
    }
    int three = 1;
    for (int i = 0; i < d; ++i) three *= 3;
    EXPECT_EQ(total, three);
    for (int g = 0; g < total; ++g) {
      const auto [m, l] = c.from_global(g);
      EXPECT_EQ(c.global_index(m, l), g);
    }
  }
}

TEST(CartesianModel, CountsIn2D) {
  const auto m = cartesian_model({0, 1, 0, 1}, {2, 3});
  EXPECT_EQ(m->num_cells(), 6);
  EXPECT_EQ(m->num_vertices(), 12);
  EXPECT_EQ(m->num_facets(), 3 * 3 + 2 * 4);
  EXPECT_DOUBLE_EQ(m->cell_size(0), 0.5);
  EXPECT_DOUBLE_EQ(m->cell_size(1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m->cell_measure(), 1.0 / 6.0);
}

TEST(CartesianModel, BoundaryEntitiesOfTheUnitSquare) {
  const auto m = cartesian_model({0, 1, 0, 1}, {4, 4});
  const auto& lab = m->labeling();
  EXPECT_EQ(lab.num_entities(), 9);
  // Vertex 0 is (0,0) -> entity 1, the last vertex (1,1) -> entity 4.
  EXPECT_EQ(lab.entity(0, 0), 1);
  EXPECT_EQ(lab.entity(0, 4), 2);
  EXPECT_EQ(lab.entity(0, 20), 3);
  EXPECT_EQ(lab.entity(0, 24), 4);
  EXPECT_EQ(lab.entity(0, 2), 5);    // bottom
  EXPECT_EQ(lab.entity(0, 22), 6);   // top
  EXPECT_EQ(lab.entity(0, 10), 7);   // left
  EXPECT_EQ(lab.entity(0, 14), 8);   // right
  EXPECT_EQ(lab.entity(0, 12), 9);   // interior
  EXPECT_EQ(lab.resolve("boundary"), (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(lab.resolve("interior"), (std::vector<int>{9}));
}

TEST(CartesianModel, EveryBoundaryFacetHasOneCell) {
  const auto m = cartesian_model({0, 1, 0, 2, 0, 1}, {3, 2, 2});
  const auto& lab = m->labeling();
  const auto interior = lab.resolve("interior");
  int boundary = 0;
  for (int f = 0; f < m->num_facets(); ++f) {
    const auto c = m->facet_cells(f);
    const bool on_boundary = c[1] < 0;
    boundary += on_boundary;
    EXPECT_EQ(on_boundary, lab.entity(2, f) != interior[0]);
    if (!on_boundary) {
      EXPECT_LT(c[0], c[1]);
    }
  }
  EXPECT_EQ(boundary, 2 * (3 * 2 + 3 * 2 + 2 * 2));
}

TEST(CartesianModel, ClosureAndSideHelpers) {
  EXPECT_EQ(entity_closure(2, 5), (std::vector<int>{1, 2, 5}));
  EXPECT_EQ(entity_closure(2, 8), (std::vector<int>{2, 4, 8}));
  EXPECT_EQ(box_side_entity(2, 1, 0), 5);
  EXPECT_EQ(box_side_entity(2, 1, 1), 6);
  EXPECT_EQ(box_side_entity(2, 0, 0), 7);
  EXPECT_EQ(box_side_entity(2, 0, 1), 8);
  // In 3D the x = 1 face closure holds 4 corners, 4 edges and the face.
  EXPECT_EQ(entity_closure(3, box_side_entity(3, 0, 1)).size(), 9u);
}

TEST(CartesianModel, FourDimensionalConstruction) {
  const auto m = cartesian_model({0, 1, 0, 1, 0, 1, 0, 1}, {2, 2, 2, 2});
  EXPECT_EQ(m->num_cells(), 16);
  EXPECT_EQ(m->num_vertices(), 81);
  EXPECT_EQ(m->labeling().num_entities(), 81);
}

TEST(CartesianModel, RejectsBadInput) {
  EXPECT_THROW(cartesian_model({0, 1, 0, 1}, {0, 2}), InvalidArgument);
  EXPECT_THROW(cartesian_model({1, 0}, {2}), InvalidArgument);
  EXPECT_THROW(cartesian_model({0, 1, 0}, {2, 2}), InvalidArgument);
}

TEST(FaceLabeling, AddTagFromTagsIsAUnion) {
  const auto m = cartesian_model({0, 1, 0, 1}, {2, 2});
  const auto lab = add_tag_from_tags(m->labeling(), "walls", {5, 7, "interior"});
  EXPECT_EQ(lab.resolve("walls"), (std::vector<int>{5, 7, 9}));
  EXPECT_FALSE(m->labeling().has_tag("walls"));
  EXPECT_THROW(add_tag_from_tags(lab, "walls", {6}), ConflictError);
  EXPECT_THROW(add_tag_from_tags(lab, "x", {"nope"}), NameResolutionError);
  EXPECT_THROW(add_tag_from_tags(lab, "x", {42}), NameResolutionError);
}

TEST(MeshIo, RoundTripPreservesModel) {
  auto m = cartesian_model({0, 1, 0, 0.3}, {3, 2});
  m = m->with_labeling(add_tag_from_tags(m->labeling(), "left", {1, 3, 7}));
  const auto text = format_model(*m);
  const auto back = parse_model(text);
  EXPECT_TRUE(*back == *m);

  const std::string path = ::testing::TempDir() + "/mesh_roundtrip.mesh";
  write_model(*m, path);
  EXPECT_TRUE(*read_model(path) == *m);
  std::remove(path.c_str());
}

TEST(MeshIo, MalformedInputRaisesParseError) {
  EXPECT_THROW(parse_model("cartfe-mesh 1\ndim two\n"), ParseError);
  EXPECT_THROW(parse_model(""), ParseError);
  EXPECT_THROW(read_model("/nonexistent/dir/none.mesh"), IoError);
}

TEST(Triangulation, BoundaryNormalsPointOutward) {
  const auto m = cartesian_model({0, 2, 0, 1}, {4, 2});
  const auto b = boundary_triangulation(m);
  EXPECT_EQ(b->num_items(), 2 * (4 + 2));
  double length = 0.0;
  for (int i = 0; i < b->num_items(); ++i) {
    const auto n = b->normal(i);
    const auto map = b->cell_map(b->cell(i));
    // The cell center plus the normal moves out of the box.
    const double cx = map.origin[0] + 0.5 * map.h[0] + n[0];
    const double cy = map.origin[1] + 0.5 * map.h[1] + n[1];
    EXPECT_TRUE(cx < 0 || cx > 2 || cy < 0 || cy > 1);
    length += b->facet_measure(i);
  }
  EXPECT_DOUBLE_EQ(length, 6.0);
}

TEST(Triangulation, SkeletonPlusSideIsSmallerCell) {
  const auto m = cartesian_model({0, 1, 0, 1, 0, 1}, {2, 2, 2});
  const auto s = skeleton_triangulation(m);
  EXPECT_EQ(s->num_items(), 3 * 4);
  for (int i = 0; i < s->num_items(); ++i) {
    EXPECT_LT(s->cell(i, 0), s->cell(i, 1));
    EXPECT_EQ(s->normal_sign(i), 1);  // lexicographic numbering: plus sits below
    EXPECT_DOUBLE_EQ(s->facet_measure(i), 0.25);
    EXPECT_DOUBLE_EQ(s->facet_diameter(i), 0.5);
  }
}

TEST(Triangulation, TaggedBoundarySubsetAndEmptyDomain) {
  const auto m = cartesian_model({0, 1, 0, 1}, {3, 3});
  EXPECT_EQ(boundary_triangulation(m, {8})->num_items(), 3);
  EXPECT_EQ(boundary_triangulation(m, {5, 6})->num_items(), 6);
  // A corner entity owns no facet.
  EXPECT_THROW(boundary_triangulation(m, {1}), EmptyDomainError);
}
