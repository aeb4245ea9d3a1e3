#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cartfe/geometry.hpp"
#include "cartfe/reffe.hpp"
#include "cartfe/value.hpp"

namespace cartfe {

/// f(x) at a physical point.
using PointFn = std::function<Value(std::span<const double>)>;

enum class Constraint { None, ZeroMean };

struct SpaceOptions {
  std::vector<TagRef> dirichlet_tags;
  /// One mask per tag (component count entries each); empty = all components.
  std::vector<std::vector<bool>> dirichlet_masks;
  Constraint constraint = Constraint::None;
};

/// Global dof numbering of one field over a model.
///
/// Cell dof ids are encoded: k >= 0 is free dof k, k < 0 is constrained dof
/// -(k+1). Constrained dofs are Dirichlet dofs (tagged) plus, under
/// ZeroMean, one pinned dof whose value is fixed at zero before the shift.
class FESpace {
public:
  FESpace(ModelPtr model, RefElemPtr reffe, SpaceOptions options = {});

  const ModelPtr& model() const noexcept { return model_; }
  const RefElemPtr& reffe() const noexcept { return reffe_; }
  Conformity conformity() const noexcept { return reffe_->conformity(); }
  ValueShape value_shape() const noexcept { return reffe_->value_shape(); }
  int num_free() const noexcept { return nfree_; }
  int num_constrained() const noexcept { return static_cast<int>(constrained_tag_.size()); }
  /// Constrained dofs that come from Dirichlet tags (excludes a zero-mean pin).
  int num_dirichlet() const noexcept { return num_constrained() - (pinned_ >= 0 ? 1 : 0); }
  int dofs_per_cell() const noexcept { return reffe_->num_dofs(); }
  std::span<const int> cell_dofs(int cell) const {
    const auto n = static_cast<std::size_t>(dofs_per_cell());
    return std::span<const int>(cell_dofs_).subspan(static_cast<std::size_t>(cell) * n, n);
  }
  const SpaceOptions& options() const noexcept { return options_; }
  int num_dirichlet_tags() const noexcept { return static_cast<int>(options_.dirichlet_tags.size()); }
  /// Tag index (into dirichlet_tags) that constrains dof k, -1 for the pin.
  int constrained_tag(int k) const { return constrained_tag_[static_cast<std::size_t>(k)]; }
  bool zero_mean() const noexcept { return options_.constraint == Constraint::ZeroMean; }
  /// Index of the pinned constrained dof, or -1.
  int pinned_dof() const noexcept { return pinned_; }

  /// Where a dof first appears: (cell, local dof).
  std::pair<int, int> free_location(int k) const { return free_loc_[static_cast<std::size_t>(k)]; }
  std::pair<int, int> constrained_location(int k) const { return con_loc_[static_cast<std::size_t>(k)]; }

  /// The dof functional applied to f on cell `cell`, local dof `local`.
  double dof_functional(const PointFn& f, int cell, int local) const;

private:
  ModelPtr model_;
  RefElemPtr reffe_;
  SpaceOptions options_;
  int nfree_ = 0;
  int pinned_ = -1;
  std::vector<int> cell_dofs_;
  std::vector<int> constrained_tag_;
  std::vector<std::pair<int, int>> free_loc_;
  std::vector<std::pair<int, int>> con_loc_;
};

using SpacePtr = std::shared_ptr<const FESpace>;

/// Test space factory. Compatibility: QLagrangian H1/L2, PLagrangian L2,
/// RaviartThomas HDiv.
SpacePtr test_space(const ModelPtr& model, Family family, int order, ValueShape shape, Conformity conformity,
                    SpaceOptions options = {});

/// A space plus the values of its constrained dofs.
class TrialFESpace {
public:
  /// Homogeneous constraints.
  explicit TrialFESpace(SpacePtr space);
  /// One function per Dirichlet tag, or a single function for all tags.
  TrialFESpace(SpacePtr space, std::vector<PointFn> dirichlet_functions);

  const SpacePtr& space() const noexcept { return space_; }
  std::span<const double> dirichlet_values() const noexcept { return values_; }

private:
  SpacePtr space_;
  std::vector<double> values_;
};

using TrialPtr = std::shared_ptr<const TrialFESpace>;
TrialPtr trial_space(SpacePtr space, std::vector<PointFn> dirichlet_functions = {});
TrialPtr trial_space(SpacePtr space, PointFn g);

/// Free and constrained dof values of a field.
struct FEFunction {
  SpacePtr space;
  std::vector<double> free_values;
  std::vector<double> constrained_values;

  double dof(int encoded) const {
    return encoded >= 0 ? free_values[static_cast<std::size_t>(encoded)]
                        : constrained_values[static_cast<std::size_t>(-encoded - 1)];
  }
  /// Value at reference point xhat of a cell (value, not derivatives).
  Value evaluate(int cell, std::span<const double> xhat) const;
};

FEFunction fe_function(const TrialFESpace& trial, std::vector<double> free_values);
FEFunction zero_function(const TrialFESpace& trial);
/// Interpolate f into free dofs; constrained dofs keep the trial values.
FEFunction interpolate(const PointFn& f, const TrialFESpace& trial);
/// Interpolate f into every dof, constrained ones included.
FEFunction interpolate_everywhere(const PointFn& f, const SpacePtr& space);

/// Integral of a scalar FE function over the model (exact for its degree).
double integrate_function(const FEFunction& f);
/// Subtract the mean value so the field integrates to zero.
FEFunction zero_mean_postshift(const FEFunction& f);

/// Ordered list of fields sharing one global free-dof numbering.
class MultiFieldSpace {
public:
  MultiFieldSpace() = default;
  MultiFieldSpace(std::vector<TrialPtr> fields);  // NOLINT: single trial converts
  MultiFieldSpace(TrialPtr field) : MultiFieldSpace(std::vector<TrialPtr>{std::move(field)}) {}  // NOLINT
  MultiFieldSpace(SpacePtr field) : MultiFieldSpace(trial_space(std::move(field))) {}  // NOLINT

  int num_fields() const noexcept { return static_cast<int>(fields_.size()); }
  const TrialFESpace& field(int i) const { return *fields_.at(static_cast<std::size_t>(i)); }
  const TrialPtr& field_ptr(int i) const { return fields_.at(static_cast<std::size_t>(i)); }
  const SpacePtr& space(int i) const { return field(i).space(); }
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  int num_free() const noexcept { return offsets_.back(); }
  const ModelPtr& model() const { return space(0)->model(); }

private:
  std::vector<TrialPtr> fields_;
  std::vector<int> offsets_{0};
};

using MultiFieldFEFunction = std::vector<FEFunction>;

/// Per-field functions from a concatenated free vector.
MultiFieldFEFunction unpack(const MultiFieldSpace& space, std::span<const double> x);
std::vector<double> pack(const MultiFieldSpace& space, const MultiFieldFEFunction& fields);

}  // namespace cartfe
