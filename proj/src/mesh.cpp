#include "cartfe/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cartfe/errors.hpp"

namespace cartfe {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

int popcount(unsigned m) { return std::popcount(m); }

}  // namespace

CubeTopology::CubeTopology(int dim) : dim_(dim), faces_(sz(dim + 1)) {
  CARTFE_THROW_IF(dim < 1 || dim > kMaxDim, InvalidArgument, "cube dimension must be in 1..4");
  const unsigned nmask = 1u << dim;
  for (int m = 0; m <= dim; ++m) {
    dim_offset_[sz(m)] = total_;
    for (unsigned mask = 0; mask < nmask; ++mask) {
      if (popcount(mask) != m) continue;
      std::array<int, kMaxDim> fixed_axes{};
      int nfixed = 0;
      for (int a = 0; a < dim; ++a)
        if (!(mask & (1u << a))) fixed_axes[sz(nfixed++)] = a;
      for (unsigned o = 0; o < (1u << nfixed); ++o) {
        Face f;
        f.mask = mask;
        f.offset.fill(0);
        for (int a = 0; a < dim; ++a)
          if (mask & (1u << a)) f.offset[sz(a)] = -1;
        for (int i = 0; i < nfixed; ++i) f.offset[sz(fixed_axes[sz(i)])] = static_cast<int>((o >> i) & 1u);
        faces_[sz(m)].push_back(f);
      }
    }
    total_ += num_faces(m);
  }
  dim_offset_[sz(dim + 1)] = total_;
}

int CubeTopology::index_of(unsigned mask, const std::array<int, kMaxDim>& offset) const {
  const auto& list = faces_[sz(popcount(mask))];
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].mask != mask) continue;
    bool same = true;
    for (int a = 0; a < dim_; ++a) {
      if (mask & (1u << a)) continue;
      same = same && list[i].offset[sz(a)] == offset[sz(a)];
    }
    if (same) return static_cast<int>(i);
  }
  throw InvalidArgument("no reference-cube face with the given mask and offset");
}

std::pair<int, int> CubeTopology::from_global(int g) const {
  CARTFE_THROW_IF(g < 0 || g >= total_, InvalidArgument, "reference-cube face index out of range");
  int m = 0;
  while (g >= dim_offset_[sz(m + 1)]) ++m;
  return {m, g - dim_offset_[sz(m)]};
}

// ---------------------------------------------------------------------------

std::string TagRef::to_string() const {
  if (const auto* s = std::get_if<std::string>(&ref)) return "\"" + *s + "\"";
  return std::to_string(std::get<int>(ref));
}

FaceLabeling::FaceLabeling(std::vector<std::vector<int>> face_entities, int num_entities)
    : entities_(std::move(face_entities)), num_entities_(num_entities) {}

std::vector<int> FaceLabeling::resolve(const TagRef& tag) const {
  if (const auto* name = std::get_if<std::string>(&tag.ref)) {
    auto it = tags_.find(*name);
    if (it == tags_.end()) throw NameResolutionError("unknown tag \"" + *name + "\"");
    return it->second;
  }
  const int id = std::get<int>(tag.ref);
  if (id < 1 || id > num_entities_) {
    throw NameResolutionError("unknown entity id " + std::to_string(id) + " (valid: 1.." +
                              std::to_string(num_entities_) + ")");
  }
  return {id};
}

std::vector<int> FaceLabeling::resolve(std::span<const TagRef> tags) const {
  std::vector<int> out;
  for (const auto& t : tags) {
    auto ids = resolve(t);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> FaceLabeling::faces_in(int m, std::span<const int> entities) const {
  std::vector<int> out;
  const auto& ent = entities_.at(sz(m));
  for (std::size_t f = 0; f < ent.size(); ++f) {
    if (std::binary_search(entities.begin(), entities.end(), ent[f])) out.push_back(static_cast<int>(f));
  }
  return out;
}

void FaceLabeling::set_tag(const std::string& name, std::vector<int> entities) {
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
  tags_[name] = std::move(entities);
}

FaceLabeling add_tag_from_tags(const FaceLabeling& labels, const std::string& new_tag,
                               std::span<const TagRef> sources) {
  CARTFE_THROW_IF(new_tag.empty(), InvalidArgument, "tag names must be non-empty");
  CARTFE_THROW_IF(labels.has_tag(new_tag), ConflictError, "tag \"" + new_tag + "\" already exists");
  FaceLabeling out = labels;
  out.set_tag(new_tag, labels.resolve(sources));
  return out;
}

FaceLabeling add_tag_from_tags(const FaceLabeling& labels, const std::string& new_tag,
                               std::initializer_list<TagRef> sources) {
  return add_tag_from_tags(labels, new_tag, std::span<const TagRef>(sources.begin(), sources.size()));
}

// ---------------------------------------------------------------------------

DiscreteModel::DiscreteModel(int dim, std::vector<double> box, std::vector<int> partition)
    : dim_(dim), box_(std::move(box)), partition_(std::move(partition)), cube_(dim) {}

std::array<int, kMaxDim> DiscreteModel::cell_position(int c) const {
  std::array<int, kMaxDim> p{};
  for (int a = 0; a < dim_; ++a) {
    p[sz(a)] = c % partition_[sz(a)];
    c /= partition_[sz(a)];
  }
  return p;
}

int DiscreteModel::cell_at(const std::array<int, kMaxDim>& pos) const {
  int c = 0;
  for (int a = dim_ - 1; a >= 0; --a) c = c * partition_[sz(a)] + pos[sz(a)];
  return c;
}

std::array<double, kMaxDim> DiscreteModel::cell_origin(int c) const {
  // The first vertex of the cell carries the exact lattice coordinate.
  std::array<double, kMaxDim> o{};
  const auto v = vertex(cell_vertices(c)[0]);
  for (int a = 0; a < dim_; ++a) o[sz(a)] = v[sz(a)];
  return o;
}

double DiscreteModel::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a) m *= cell_size(a);
  return m;
}

int DiscreteModel::face_index(unsigned mask, const std::array<int, kMaxDim>& pos) const {
  const int m = popcount(mask);
  int idx = 0;
  for (int a = dim_ - 1; a >= 0; --a) {
    const int ext = partition_[sz(a)] + ((mask & (1u << a)) ? 0 : 1);
    idx = idx * ext + pos[sz(a)];
  }
  return mask_offset_[sz(m)][mask] + idx;
}

std::span<const int> DiscreteModel::face_vertices(int m, int f) const {
  const std::size_t nv = std::size_t{1} << m;
  return std::span<const int>(face_vertices_[sz(m)]).subspan(sz(f) * nv, nv);
}

void DiscreteModel::build_topology() {
  const int d = dim_;
  const unsigned nmask = 1u << d;
  face_count_.assign(sz(d + 1), 0);
  mask_offset_.assign(sz(d + 1), std::vector<int>(nmask, -1));
  face_vertices_.assign(sz(d + 1), {});
  cell_faces_.assign(sz(d + 1), {});

  std::array<int, kMaxDim> vext{};
  for (int a = 0; a < d; ++a) vext[sz(a)] = partition_[sz(a)] + 1;
  auto vertex_id = [&](const std::array<int, kMaxDim>& p) {
    int v = 0;
    for (int a = d - 1; a >= 0; --a) v = v * vext[sz(a)] + p[sz(a)];
    return v;
  };

  // Faces of each dimension, grouped by mask in ascending order.
  for (int m = 0; m <= d; ++m) {
    int count = 0;
    for (unsigned mask = 0; mask < nmask; ++mask) {
      if (popcount(mask) != m) continue;
      mask_offset_[sz(m)][mask] = count;
      std::array<int, kMaxDim> ext{};
      int nfaces = 1;
      std::array<int, kMaxDim> axes{};
      int nax = 0;
      for (int a = 0; a < d; ++a) {
        ext[sz(a)] = partition_[sz(a)] + ((mask & (1u << a)) ? 0 : 1);
        nfaces *= ext[sz(a)];
        if (mask & (1u << a)) axes[sz(nax++)] = a;
      }
      auto& fv = face_vertices_[sz(m)];
      std::array<int, kMaxDim> pos{};
      for (int f = 0; f < nfaces; ++f) {
        int r = f;
        for (int a = 0; a < d; ++a) {
          pos[sz(a)] = r % ext[sz(a)];
          r /= ext[sz(a)];
        }
        for (unsigned b = 0; b < (1u << m); ++b) {
          auto q = pos;
          for (int i = 0; i < nax; ++i) q[sz(axes[sz(i)])] += static_cast<int>((b >> i) & 1u);
          fv.push_back(vertex_id(q));
        }
      }
      count += nfaces;
    }
    face_count_[sz(m)] = count;
  }

  // Vertex coordinates; the last lattice line is pinned to the box end.
  const int nv = face_count_[0];
  coords_.assign(sz(nv * d), 0.0);
  for (int v = 0; v < nv; ++v) {
    int r = v;
    for (int a = 0; a < d; ++a) {
      const int i = r % vext[sz(a)];
      r /= vext[sz(a)];
      const double x0 = box_[sz(2 * a)], x1 = box_[sz(2 * a + 1)];
      const int n = partition_[sz(a)];
      coords_[sz(v * d + a)] = (i == n) ? x1 : x0 + (x1 - x0) * static_cast<double>(i) / n;
    }
  }

  // Cell-to-face incidence for every dimension.
  const int nc = face_count_[sz(d)];
  for (int m = 0; m <= d; ++m) {
    const int nl = cube_.num_faces(m);
    auto& cf = cell_faces_[sz(m)];
    cf.resize(sz(nc * nl));
    for (int c = 0; c < nc; ++c) {
      const auto cp = cell_position(c);
      for (int l = 0; l < nl; ++l) {
        const auto& lf = cube_.face(m, l);
        auto p = cp;
        for (int a = 0; a < d; ++a)
          if (lf.offset[sz(a)] > 0) p[sz(a)] += 1;
        cf[sz(c * nl + l)] = face_index(lf.mask, p);
      }
    }
  }

  facet_cells_.assign(sz(2 * face_count_[sz(d - 1)]), -1);
  {
    const int nl = cube_.num_faces(d - 1);
    for (int c = 0; c < nc; ++c) {
      for (int l = 0; l < nl; ++l) {
        const int f = cell_face(d - 1, c, l);
        auto& slot0 = facet_cells_[sz(2 * f)];
        if (slot0 < 0) slot0 = c;
        else facet_cells_[sz(2 * f + 1)] = c;
      }
    }
  }

  // Entity ids: a face's box entity is obtained by letting every axis on which
  // the face sits strictly inside the box join its mask.
  std::vector<std::vector<int>> ent(sz(d + 1));
  for (int m = 0; m <= d; ++m) {
    ent[sz(m)].resize(sz(face_count_[sz(m)]));
    for (int f = 0; f < face_count_[sz(m)]; ++f) {
      const auto verts = face_vertices(m, f);
      // The first (smallest) vertex is the face's lattice position.
      std::array<int, kMaxDim> p{};
      int r = verts[0];
      for (int a = 0; a < d; ++a) {
        p[sz(a)] = r % vext[sz(a)];
        r /= vext[sz(a)];
      }
      // Recover the mask from the last vertex.
      unsigned mask = 0;
      r = verts[verts.size() - 1];
      for (int a = 0; a < d; ++a) {
        if (r % vext[sz(a)] != p[sz(a)]) mask |= 1u << a;
        r /= vext[sz(a)];
      }
      unsigned bmask = mask;
      std::array<int, kMaxDim> off{};
      for (int a = 0; a < d; ++a) {
        if (mask & (1u << a)) continue;
        if (p[sz(a)] > 0 && p[sz(a)] < partition_[sz(a)]) bmask |= 1u << a;
        else off[sz(a)] = (p[sz(a)] == 0) ? 0 : 1;
      }
      const int bm = popcount(bmask);
      ent[sz(m)][sz(f)] = 1 + cube_.global_index(bm, cube_.index_of(bmask, off));
    }
  }
  const int nent = cube_.num_faces_total();
  labels_ = FaceLabeling(std::move(ent), nent);
  std::vector<int> bnd(sz(nent - 1));
  for (int i = 0; i < nent - 1; ++i) bnd[sz(i)] = i + 1;
  labels_.set_tag("boundary", std::move(bnd));
  labels_.set_tag("interior", {nent});
}

ModelPtr DiscreteModel::with_labeling(FaceLabeling labels) const {
  CARTFE_THROW_IF(labels.num_dims() != dim_ + 1, InvalidArgument, "labeling dimension mismatch");
  for (int m = 0; m <= dim_; ++m) {
    CARTFE_THROW_IF(static_cast<int>(labels.face_entities(m).size()) != num_faces(m), InvalidArgument,
                    "labeling face count mismatch");
  }
  auto copy = std::shared_ptr<DiscreteModel>(new DiscreteModel(*this));
  copy->labels_ = std::move(labels);
  return copy;
}

bool operator==(const DiscreteModel& a, const DiscreteModel& b) {
  return a.dim_ == b.dim_ && a.box_ == b.box_ && a.partition_ == b.partition_ && a.coords_ == b.coords_ &&
         a.labels_ == b.labels_;
}

ModelPtr cartesian_model(std::span<const double> domain_box, std::span<const int> partition) {
  const int d = static_cast<int>(partition.size());
  CARTFE_THROW_IF(d < 1 || d > kMaxDim, InvalidArgument, "dimension must be in 1..4");
  CARTFE_THROW_IF(domain_box.size() != sz(2 * d), InvalidArgument,
                  "domain box needs 2 values per axis (" + std::to_string(2 * d) + " expected)");
  for (int a = 0; a < d; ++a) {
    CARTFE_THROW_IF(partition[sz(a)] < 1, InvalidArgument, "partition entries must be >= 1");
    CARTFE_THROW_IF(!(domain_box[sz(2 * a + 1)] > domain_box[sz(2 * a)]), InvalidArgument,
                    "box extents must be positive along every axis");
  }
  auto m = std::shared_ptr<DiscreteModel>(new DiscreteModel(
      d, std::vector<double>(domain_box.begin(), domain_box.end()), std::vector<int>(partition.begin(), partition.end())));
  m->build_topology();
  return m;
}

ModelPtr cartesian_model(std::initializer_list<double> domain_box, std::initializer_list<int> partition) {
  return cartesian_model(std::span<const double>(domain_box.begin(), domain_box.size()),
                         std::span<const int>(partition.begin(), partition.size()));
}

ModelPtr build_model_with_coords(std::span<const double> domain_box, std::span<const int> partition,
                                 std::vector<double> coords, FaceLabeling labels) {
  auto base = cartesian_model(domain_box, partition);
  auto m = std::shared_ptr<DiscreteModel>(new DiscreteModel(*base));
  CARTFE_THROW_IF(coords.size() != m->coords_.size(), ParseError, "vertex count mismatch");
  m->coords_ = std::move(coords);
  m->labels_ = std::move(labels);
  return m;
}

std::vector<int> entity_closure(int dim, int entity) {
  CubeTopology cube(dim);
  CARTFE_THROW_IF(entity < 1 || entity > cube.num_faces_total(), InvalidArgument,
                  "entity id out of range: " + std::to_string(entity));
  const auto [m, l] = cube.from_global(entity - 1);
  const auto& top = cube.face(m, l);
  std::vector<int> out;
  for (int k = 0; k <= m; ++k) {
    for (int i = 0; i < cube.num_faces(k); ++i) {
      const auto& f = cube.face(k, i);
      if ((f.mask & ~top.mask) != 0) continue;
      bool ok = true;
      for (int a = 0; a < dim; ++a)
        if (!(top.mask & (1u << a)) && f.offset[sz(a)] != top.offset[sz(a)]) ok = false;
      if (ok) out.push_back(1 + cube.global_index(k, i));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int box_side_entity(int dim, int axis, int side) {
  CubeTopology cube(dim);
  CARTFE_THROW_IF(axis < 0 || axis >= dim || side < 0 || side > 1, InvalidArgument, "invalid box side");
  return 1 + cube.global_index(dim - 1, cube.facet(axis, side));
}

}  // namespace cartfe
