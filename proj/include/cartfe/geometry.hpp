#pragma once

#include <array>
#include <memory>
#include <vector>

#include "cartfe/mesh.hpp"

namespace cartfe {

enum class DomainKind { Interior, Boundary, Skeleton };
const char* domain_kind_name(DomainKind k) noexcept;

/// Affine map of a Cartesian cell: x = origin + diag(h) * xhat.
struct CellMap {
  std::array<double, kMaxDim> origin{};
  std::array<double, kMaxDim> h{};
  double det = 1.0;
};

/// An integration domain: cells (Interior), tagged boundary facets
/// (Boundary) or interior facets (Skeleton). Items are cells or facets.
///
/// For a skeleton facet the plus side is the cell with the smaller id and
/// the normal points out of it; boundary normals point out of the domain.
class Triangulation {
public:
  DomainKind kind() const noexcept { return kind_; }
  const ModelPtr& model() const noexcept { return model_; }
  int dim() const noexcept { return model_->dim(); }
  int num_items() const noexcept { return static_cast<int>(cell_.size() / 2); }
  std::size_t id() const noexcept { return id_; }

  /// side 0 = the owner/plus cell, side 1 = the minus cell (skeleton only).
  int cell(int item, int side = 0) const { return cell_[static_cast<std::size_t>(2 * item + side)]; }
  int local_facet(int item, int side = 0) const { return lfacet_[static_cast<std::size_t>(2 * item + side)]; }
  int facet(int item) const { return facet_[static_cast<std::size_t>(item)]; }
  /// Normal of a facet item: axis and sign (+1/-1).
  int normal_axis(int item) const { return normal_axis_[static_cast<std::size_t>(item)]; }
  int normal_sign(int item) const { return normal_sign_[static_cast<std::size_t>(item)]; }
  std::array<double, kMaxDim> normal(int item) const;
  /// Facet measure (length/area) and diameter |F| (max tangential edge).
  double facet_measure(int item) const;
  double facet_diameter(int item) const;

  CellMap cell_map(int cell) const;

  /// Number of cells in the item (2 for skeleton facets).
  int num_sides() const noexcept { return kind_ == DomainKind::Skeleton ? 2 : 1; }

private:
  friend std::shared_ptr<const Triangulation> triangulation(const ModelPtr&);
  friend std::shared_ptr<const Triangulation> boundary_triangulation(const ModelPtr&, std::span<const TagRef>);
  friend std::shared_ptr<const Triangulation> skeleton_triangulation(const ModelPtr&);
  Triangulation(ModelPtr model, DomainKind kind);

  ModelPtr model_;
  DomainKind kind_;
  std::size_t id_;
  std::vector<int> cell_;    // 2 per item
  std::vector<int> lfacet_;  // 2 per item
  std::vector<int> facet_;
  std::vector<int> normal_axis_;
  std::vector<int> normal_sign_;
};

using DomainPtr = std::shared_ptr<const Triangulation>;

DomainPtr triangulation(const ModelPtr& model);
/// Facets on the model boundary whose entity belongs to one of `tags`
/// (default: "boundary"). Throws EmptyDomainError if none qualify.
DomainPtr boundary_triangulation(const ModelPtr& model, std::span<const TagRef> tags);
DomainPtr boundary_triangulation(const ModelPtr& model, std::initializer_list<TagRef> tags = {"boundary"});
DomainPtr skeleton_triangulation(const ModelPtr& model);

}  // namespace cartfe
