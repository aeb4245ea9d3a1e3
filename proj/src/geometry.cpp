#include "cartfe/geometry.hpp"

#include <algorithm>
#include <atomic>

#include "cartfe/errors.hpp"

namespace cartfe {

namespace {

std::size_t next_domain_id() {
  static std::atomic<std::size_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

const char* domain_kind_name(DomainKind k) noexcept {
  switch (k) {
    case DomainKind::Interior: return "interior";
    case DomainKind::Boundary: return "boundary";
    case DomainKind::Skeleton: return "skeleton";
  }
  return "?";
}

Triangulation::Triangulation(ModelPtr model, DomainKind kind)
    : model_(std::move(model)), kind_(kind), id_(next_domain_id()) {}

std::array<double, kMaxDim> Triangulation::normal(int item) const {
  CARTFE_THROW_IF(kind_ == DomainKind::Interior, UnsupportedDomainError,
                  "normals are defined on boundary and skeleton domains only");
  std::array<double, kMaxDim> n{};
  n[static_cast<std::size_t>(normal_axis(item))] = normal_sign(item);
  return n;
}

double Triangulation::facet_measure(int item) const {
  CARTFE_THROW_IF(kind_ == DomainKind::Interior, UnsupportedDomainError, "facet measure on an interior domain");
  double m = 1.0;
  for (int a = 0; a < dim(); ++a)
    if (a != normal_axis(item)) m *= model_->cell_size(a);
  return m;
}

double Triangulation::facet_diameter(int item) const {
  CARTFE_THROW_IF(kind_ == DomainKind::Interior, UnsupportedDomainError, "facet diameter on an interior domain");
  double h = 0.0;
  for (int a = 0; a < dim(); ++a)
    if (a != normal_axis(item)) h = std::max(h, model_->cell_size(a));
  // A 1D model has point facets; fall back to the cell width.
  return dim() == 1 ? model_->cell_size(0) : h;
}

CellMap Triangulation::cell_map(int c) const {
  CellMap m;
  m.origin = model_->cell_origin(c);
  m.det = 1.0;
  for (int a = 0; a < dim(); ++a) {
    m.h[static_cast<std::size_t>(a)] = model_->cell_size(a);
    m.det *= m.h[static_cast<std::size_t>(a)];
  }
  return m;
}

DomainPtr triangulation(const ModelPtr& model) {
  CARTFE_THROW_IF(!model, InvalidArgument, "null model");
  auto t = std::shared_ptr<Triangulation>(new Triangulation(model, DomainKind::Interior));
  const int nc = model->num_cells();
  t->cell_.reserve(static_cast<std::size_t>(2 * nc));
  for (int c = 0; c < nc; ++c) {
    t->cell_.push_back(c);
    t->cell_.push_back(-1);
    t->lfacet_.push_back(-1);
    t->lfacet_.push_back(-1);
    t->facet_.push_back(-1);
    t->normal_axis_.push_back(0);
    t->normal_sign_.push_back(0);
  }
  return t;
}

DomainPtr boundary_triangulation(const ModelPtr& model, std::span<const TagRef> tags) {
  CARTFE_THROW_IF(!model, InvalidArgument, "null model");
  const auto entities = model->labeling().resolve(tags);
  auto t = std::shared_ptr<Triangulation>(new Triangulation(model, DomainKind::Boundary));
  const int d = model->dim();
  const auto& cube = model->cube();
  // Walk cells so facets come out grouped by owner, in a fixed order.
  for (int c = 0; c < model->num_cells(); ++c) {
    for (int lf = 0; lf < 2 * d; ++lf) {
      const int f = model->cell_face(d - 1, c, lf);
      if (model->facet_cells(f)[1] >= 0) continue;
      if (!std::binary_search(entities.begin(), entities.end(), model->labeling().entity(d - 1, f))) continue;
      t->cell_.push_back(c);
      t->cell_.push_back(-1);
      t->lfacet_.push_back(lf);
      t->lfacet_.push_back(-1);
      t->facet_.push_back(f);
      t->normal_axis_.push_back(cube.facet_axis(lf));
      t->normal_sign_.push_back(cube.facet_side(lf) == 1 ? 1 : -1);
    }
  }
  if (t->facet_.empty()) {
    std::string names;
    for (const auto& tag : tags) names += (names.empty() ? "" : ", ") + tag.to_string();
    throw EmptyDomainError("boundary tags [" + names + "] select no boundary facets");
  }
  return t;
}

DomainPtr boundary_triangulation(const ModelPtr& model, std::initializer_list<TagRef> tags) {
  return boundary_triangulation(model, std::span<const TagRef>(tags.begin(), tags.size()));
}

DomainPtr skeleton_triangulation(const ModelPtr& model) {
  CARTFE_THROW_IF(!model, InvalidArgument, "null model");
  auto t = std::shared_ptr<Triangulation>(new Triangulation(model, DomainKind::Skeleton));
  const int d = model->dim();
  const auto& cube = model->cube();
  for (int f = 0; f < model->num_facets(); ++f) {
    const auto cells = model->facet_cells(f);
    if (cells[1] < 0) continue;
    int lf_plus = -1, lf_minus = -1;
    for (int lf = 0; lf < 2 * d; ++lf) {
      if (model->cell_face(d - 1, cells[0], lf) == f) lf_plus = lf;
      if (model->cell_face(d - 1, cells[1], lf) == f) lf_minus = lf;
    }
    t->cell_.push_back(cells[0]);
    t->cell_.push_back(cells[1]);
    t->lfacet_.push_back(lf_plus);
    t->lfacet_.push_back(lf_minus);
    t->facet_.push_back(f);
    t->normal_axis_.push_back(cube.facet_axis(lf_plus));
    t->normal_sign_.push_back(cube.facet_side(lf_plus) == 1 ? 1 : -1);
  }
  if (t->facet_.empty()) throw EmptyDomainError("the model has no interior facets");
  return t;
}

}  // namespace cartfe
