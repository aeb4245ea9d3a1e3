#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cartfe {

constexpr int kMaxDim = 4;

/// Faces of the reference cube [0,1]^d, all dimensions.
///
/// Faces of dimension m are listed by axis mask (the axes the face extends
/// along) in ascending mask order; within a mask, the fixed coordinates of
/// the remaining axes run lexicographically with the lowest axis fastest.
/// For d = 2 this gives vertices (0,0),(1,0),(0,1),(1,1), then edges
/// y=0, y=1, x=0, x=1, then the interior.
class CubeTopology {
public:
  struct Face {
    unsigned mask = 0;             // axes the face extends along
    std::array<int, kMaxDim> offset{};  // 0/1 on fixed axes, -1 on extended axes
  };

  explicit CubeTopology(int dim);

  int dim() const noexcept { return dim_; }
  int num_faces(int m) const { return static_cast<int>(faces_[static_cast<std::size_t>(m)].size()); }
  int num_faces_total() const noexcept { return total_; }
  const Face& face(int m, int local) const { return faces_[static_cast<std::size_t>(m)][static_cast<std::size_t>(local)]; }
  int index_of(unsigned mask, const std::array<int, kMaxDim>& offset) const;
  /// Index among all faces, dimensions in ascending order (0-based).
  int global_index(int m, int local) const { return dim_offset_[static_cast<std::size_t>(m)] + local; }
  std::pair<int, int> from_global(int g) const;

  /// Local facet for a normal axis and side (0 at x_axis = 0, 1 at x_axis = 1).
  int facet(int axis, int side) const noexcept { return (dim_ - 1 - axis) * 2 + side; }
  int facet_axis(int f) const noexcept { return dim_ - 1 - f / 2; }
  int facet_side(int f) const noexcept { return f % 2; }

private:
  int dim_;
  int total_ = 0;
  std::vector<std::vector<Face>> faces_;
  std::array<int, kMaxDim + 2> dim_offset_{};
};

/// A tag argument: either a tag name or a raw geometric entity id.
struct TagRef {
  std::variant<std::string, int> ref;
  TagRef(std::string s) : ref(std::move(s)) {}  // NOLINT
  TagRef(const char* s) : ref(std::string(s)) {}  // NOLINT
  TagRef(int id) : ref(id) {}  // NOLINT
  std::string to_string() const;
};

/// One entity id per face of every dimension plus named entity sets.
class FaceLabeling {
public:
  FaceLabeling() = default;
  FaceLabeling(std::vector<std::vector<int>> face_entities, int num_entities);

  int num_dims() const noexcept { return static_cast<int>(entities_.size()); }
  int num_entities() const noexcept { return num_entities_; }
  std::span<const int> face_entities(int m) const { return entities_.at(static_cast<std::size_t>(m)); }
  int entity(int m, int face) const { return entities_[static_cast<std::size_t>(m)][static_cast<std::size_t>(face)]; }

  const std::map<std::string, std::vector<int>>& tags() const noexcept { return tags_; }
  bool has_tag(const std::string& name) const { return tags_.count(name) != 0; }

  /// Sorted entity ids a tag stands for; throws NameResolutionError.
  std::vector<int> resolve(const TagRef& tag) const;
  std::vector<int> resolve(std::span<const TagRef> tags) const;

  /// Faces of dimension m whose entity lies in `entities` (sorted input).
  std::vector<int> faces_in(int m, std::span<const int> entities) const;

  /// Low-level insertion used by builders and the file reader.
  void set_tag(const std::string& name, std::vector<int> entities);

  friend bool operator==(const FaceLabeling&, const FaceLabeling&) = default;

private:
  std::vector<std::vector<int>> entities_;
  int num_entities_ = 0;
  std::map<std::string, std::vector<int>> tags_;
};

/// Union of the source tags under a new name. Returns a new labeling; the
/// input is untouched. Throws NameResolutionError / ConflictError.
FaceLabeling add_tag_from_tags(const FaceLabeling& labels, const std::string& new_tag,
                               std::span<const TagRef> sources);
FaceLabeling add_tag_from_tags(const FaceLabeling& labels, const std::string& new_tag,
                               std::initializer_list<TagRef> sources);

/// Axis-aligned box [x0,x1] x ... split into a tensor grid of boxes.
///
/// Vertices and cells are numbered lexicographically with x fastest; cell
/// vertices follow the reference-cube vertex order. Immutable after
/// construction.
class DiscreteModel {
public:
  int dim() const noexcept { return dim_; }
  std::span<const double> box() const noexcept { return box_; }
  std::span<const int> partition() const noexcept { return partition_; }
  const CubeTopology& cube() const noexcept { return cube_; }

  int num_cells() const noexcept { return num_faces(dim_); }
  int num_vertices() const noexcept { return num_faces(0); }
  int num_faces(int m) const { return face_count_[static_cast<std::size_t>(m)]; }
  int num_facets() const { return num_faces(dim_ - 1); }

  std::span<const double> vertex_coords() const noexcept { return coords_; }
  std::span<const double> vertex(int v) const {
    return std::span<const double>(coords_).subspan(static_cast<std::size_t>(v * dim_), static_cast<std::size_t>(dim_));
  }
  /// Sorted vertex ids of face `f` of dimension m (for m = dim, the cell's
  /// vertices in reference order).
  std::span<const int> face_vertices(int m, int f) const;
  std::span<const int> cell_vertices(int c) const { return face_vertices(dim_, c); }
  /// Global face of dimension m for local face `local` of cell c.
  int cell_face(int m, int c, int local) const {
    const auto nl = static_cast<std::size_t>(cube_.num_faces(m));
    return cell_faces_[static_cast<std::size_t>(m)][static_cast<std::size_t>(c) * nl + static_cast<std::size_t>(local)];
  }
  /// Cells adjacent to facet f, ascending; second entry -1 on the boundary.
  std::array<int, 2> facet_cells(int f) const {
    return {facet_cells_[static_cast<std::size_t>(2 * f)], facet_cells_[static_cast<std::size_t>(2 * f + 1)]};
  }

  std::array<int, kMaxDim> cell_position(int c) const;
  int cell_at(const std::array<int, kMaxDim>& pos) const;
  /// Cell width along `axis` (uniform grid).
  double cell_size(int axis) const { return (box_[static_cast<std::size_t>(2 * axis + 1)] - box_[static_cast<std::size_t>(2 * axis)]) / partition_[static_cast<std::size_t>(axis)]; }
  std::array<double, kMaxDim> cell_origin(int c) const;
  double cell_measure() const;

  /// Face of dimension |mask| at lattice position `pos` extending along `mask`.
  int face_index(unsigned mask, const std::array<int, kMaxDim>& pos) const;

  const FaceLabeling& labeling() const noexcept { return labels_; }

  /// Same geometry with a different labeling (shares nothing mutable).
  std::shared_ptr<const DiscreteModel> with_labeling(FaceLabeling labels) const;

  friend bool operator==(const DiscreteModel& a, const DiscreteModel& b);

private:
  friend std::shared_ptr<const DiscreteModel> cartesian_model(std::span<const double>, std::span<const int>);
  friend std::shared_ptr<const DiscreteModel> build_model_with_coords(std::span<const double>, std::span<const int>,
                                                                      std::vector<double>, FaceLabeling);
  DiscreteModel(int dim, std::vector<double> box, std::vector<int> partition);
  void build_topology();

  int dim_;
  std::vector<double> box_;
  std::vector<int> partition_;
  CubeTopology cube_;
  std::vector<int> face_count_;
  std::vector<std::vector<int>> mask_offset_;  // [m][mask] -> first face index of that mask
  std::vector<double> coords_;
  std::vector<std::vector<int>> face_vertices_;  // [m] flattened, 2^m per face
  std::vector<std::vector<int>> cell_faces_;     // [m] flattened
  std::vector<int> facet_cells_;
  FaceLabeling labels_;
};

using ModelPtr = std::shared_ptr<const DiscreteModel>;

/// domain_box = (x0, x1, y0, y1, ...), partition = cells per axis; 1 <= d <= 4.
///
/// Boundary entities follow the reference-cube face order of the whole box
/// (1-based): for d = 2 corners 1..4, edges 5 (y=y0), 6 (y=y1), 7 (x=x0),
/// 8 (x=x1), interior 9. Tags "boundary" and "interior" are predefined.
ModelPtr cartesian_model(std::span<const double> domain_box, std::span<const int> partition);
ModelPtr cartesian_model(std::initializer_list<double> domain_box, std::initializer_list<int> partition);

/// Model over an explicit vertex list and labeling (used by the file reader).
ModelPtr build_model_with_coords(std::span<const double> domain_box, std::span<const int> partition,
                                 std::vector<double> coords, FaceLabeling labels);

/// Entity ids of the box face `entity` plus all of its lower-dimensional
/// boundary faces (its closure).
std::vector<int> entity_closure(int dim, int entity);

/// Entity id of the box side x_axis = lower (side 0) or upper (side 1).
int box_side_entity(int dim, int axis, int side);

/// Native line-oriented text format; see mesh_io.cpp for the grammar.
void write_model(const DiscreteModel& model, const std::string& path);
ModelPtr read_model(const std::string& path);
ModelPtr parse_model(const std::string& text);
std::string format_model(const DiscreteModel& model);

}  // namespace cartfe
