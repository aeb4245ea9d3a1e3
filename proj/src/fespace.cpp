#include "cartfe/fespace.hpp"

#include <algorithm>
#include <unordered_map>

#include "cartfe/errors.hpp"
#include "cartfe/quadrature.hpp"

namespace cartfe {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

void check_family(Family family, Conformity conformity) {
  const bool ok = (family == Family::QLagrangian && (conformity == Conformity::H1 || conformity == Conformity::L2)) ||
                  (family == Family::PLagrangian && conformity == Conformity::L2) ||
                  (family == Family::RaviartThomas && conformity == Conformity::HDiv);
  CARTFE_THROW_IF(!ok, InvalidArgument,
                  std::string(family_name(family)) + " elements cannot be " + conformity_name(conformity) + "-conforming");
}

}  // namespace

FESpace::FESpace(ModelPtr model, RefElemPtr reffe, SpaceOptions options)
    : model_(std::move(model)), reffe_(std::move(reffe)), options_(std::move(options)) {
  CARTFE_THROW_IF(!model_ || !reffe_, InvalidArgument, "null model or reference element");
  CARTFE_THROW_IF(model_->dim() != reffe_->dim(), InvalidArgument, "element and model dimensions differ");
  check_family(reffe_->family(), reffe_->conformity());
  const int ntags = static_cast<int>(options_.dirichlet_tags.size());
  const int ncomp = reffe_->num_components();
  if (!options_.dirichlet_masks.empty()) {
    CARTFE_THROW_IF(reffe_->conformity() == Conformity::HDiv, InvalidArgument,
                    "component masks do not apply to HDiv spaces");
    CARTFE_THROW_IF(static_cast<int>(options_.dirichlet_masks.size()) != ntags, InvalidArgument,
                    "need one Dirichlet mask per tag (" + std::to_string(ntags) + " tags, " +
                        std::to_string(options_.dirichlet_masks.size()) + " masks)");
    for (const auto& m : options_.dirichlet_masks) {
      CARTFE_THROW_IF(static_cast<int>(m.size()) != ncomp, InvalidArgument,
                      "Dirichlet mask has " + std::to_string(m.size()) + " entries, the field has " +
                          std::to_string(ncomp) + " components");
    }
  }
  const auto& labels = model_->labeling();
  std::vector<std::vector<int>> tag_entities;
  for (const auto& t : options_.dirichlet_tags) {
    auto ids = labels.resolve(t);
    std::sort(ids.begin(), ids.end());
    tag_entities.push_back(std::move(ids));
  }

  // Raw numbering: first appearance over cells, local dof order.
  const int d = model_->dim();
  const int nc = model_->num_cells();
  const int nd = reffe_->num_dofs();
  const bool discontinuous = reffe_->conformity() == Conformity::L2;
  std::vector<int> raw(sz(nc * nd));
  std::vector<int> raw_entity, raw_comp;
  std::vector<std::pair<int, int>> raw_loc;
  std::unordered_map<std::uint64_t, int> shared;
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < nd; ++i) {
      const DofInfo& info = reffe_->dofs()[sz(i)];
      int id = -1;
      int entity = 0;
      if (discontinuous || info.face_dim == d) {
        entity = labels.entity(d, c);
      } else {
        const int face = model_->cell_face(info.face_dim, c, info.face_local);
        entity = labels.entity(info.face_dim, face);
        const std::uint64_t key = (static_cast<std::uint64_t>(face) << 24) |
                                  (static_cast<std::uint64_t>(info.slot) << 5) |
                                  (static_cast<std::uint64_t>(info.component) << 3) |
                                  static_cast<std::uint64_t>(info.face_dim);
        auto [it, inserted] = shared.try_emplace(key, static_cast<int>(raw_entity.size()));
        if (!inserted) id = it->second;
      }
      if (id < 0) {
        id = static_cast<int>(raw_entity.size());
        raw_entity.push_back(entity);
        raw_comp.push_back(info.component);
        raw_loc.emplace_back(c, i);
      }
      raw[sz(c * nd + i)] = id;
    }
  }

  // -1 free, t >= 0 Dirichlet tag t (later tags overwrite), -2 zero-mean pin.
  const int nraw = static_cast<int>(raw_entity.size());
  std::vector<int> raw_tag(sz(nraw), -1);
  for (int t = 0; t < ntags; ++t) {
    const auto& ents = tag_entities[sz(t)];
    for (int r = 0; r < nraw; ++r) {
      if (!std::binary_search(ents.begin(), ents.end(), raw_entity[sz(r)])) continue;
      if (!options_.dirichlet_masks.empty() && !options_.dirichlet_masks[sz(t)][sz(raw_comp[sz(r)])]) continue;
      raw_tag[sz(r)] = t;
    }
  }
  if (options_.constraint == Constraint::ZeroMean) {
    for (int r = nraw - 1; r >= 0; --r) {
      if (raw_tag[sz(r)] == -1) {
        raw_tag[sz(r)] = -2;
        break;
      }
    }
  }

  std::vector<int> final_id(sz(nraw));
  for (int r = 0; r < nraw; ++r) {
    if (raw_tag[sz(r)] == -1) {
      final_id[sz(r)] = nfree_++;
      free_loc_.push_back(raw_loc[sz(r)]);
    } else {
      const int k = static_cast<int>(constrained_tag_.size());
      if (raw_tag[sz(r)] == -2) pinned_ = k;
      constrained_tag_.push_back(raw_tag[sz(r)] == -2 ? -1 : raw_tag[sz(r)]);
      con_loc_.push_back(raw_loc[sz(r)]);
      final_id[sz(r)] = -(k + 1);
    }
  }
  cell_dofs_.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) cell_dofs_[k] = final_id[sz(raw[k])];
}

double FESpace::dof_functional(const PointFn& f, int cell, int local) const {
  const DofInfo& info = reffe_->dofs()[sz(local)];
  const int d = model_->dim();
  const auto origin = model_->cell_origin(cell);
  std::array<double, kMaxDim> x{};
  double det = 1.0;
  for (int a = 0; a < d; ++a) {
    x[sz(a)] = origin[sz(a)] + model_->cell_size(a) * info.node[sz(a)];
    det *= model_->cell_size(a);
  }
  const Value v = f(std::span<const double>(x.data(), sz(d)));
  const ValueShape want = reffe_->value_shape();
  CARTFE_THROW_IF(!(v.shape() == want), KindError,
                  std::string("function returns a ") + kind_name(v.kind()) + ", the space holds " + kind_name(want.kind) +
                      " values");
  const double comp = v[info.component];
  if (reffe_->conformity() == Conformity::HDiv) {
    // Nodal normal flux density times the facet measure.
    return det / model_->cell_size(info.component) * comp;
  }
  return comp;
}

SpacePtr test_space(const ModelPtr& model, Family family, int order, ValueShape shape, Conformity conformity,
                    SpaceOptions options) {
  CARTFE_THROW_IF(!model, InvalidArgument, "null model");
  check_family(family, conformity);
  RefElemPtr e;
  switch (family) {
    case Family::QLagrangian: e = q_lagrangian(model->dim(), order, shape, conformity); break;
    case Family::PLagrangian: e = p_lagrangian(model->dim(), order, shape); break;
    case Family::RaviartThomas:
      CARTFE_THROW_IF(!(shape == ValueShape::vector(model->dim())), InvalidArgument,
                      "Raviart-Thomas spaces are d-vector valued");
      e = raviart_thomas(model->dim(), order);
      break;
  }
  return std::make_shared<FESpace>(model, e, std::move(options));
}

// ---------------------------------------------------------------------------

TrialFESpace::TrialFESpace(SpacePtr space) : space_(std::move(space)) {
  CARTFE_THROW_IF(!space_, InvalidArgument, "null space");
  values_.assign(sz(space_->num_constrained()), 0.0);
}

TrialFESpace::TrialFESpace(SpacePtr space, std::vector<PointFn> fns) : TrialFESpace(std::move(space)) {
  if (fns.empty()) return;
  const int ntags = space_->num_dirichlet_tags();
  CARTFE_THROW_IF(fns.size() != 1 && static_cast<int>(fns.size()) != ntags, InvalidArgument,
                  "got " + std::to_string(fns.size()) + " Dirichlet functions for " + std::to_string(ntags) + " tags");
  for (int k = 0; k < space_->num_constrained(); ++k) {
    const int t = space_->constrained_tag(k);
    if (t < 0) continue;
    const auto& fn = fns.size() == 1 ? fns[0] : fns[sz(t)];
    const auto [c, i] = space_->constrained_location(k);
    values_[sz(k)] = space_->dof_functional(fn, c, i);
  }
}

TrialPtr trial_space(SpacePtr space, std::vector<PointFn> fns) {
  return std::make_shared<TrialFESpace>(std::move(space), std::move(fns));
}

TrialPtr trial_space(SpacePtr space, PointFn g) {
  return std::make_shared<TrialFESpace>(std::move(space), std::vector<PointFn>{std::move(g)});
}

// ---------------------------------------------------------------------------

Value FEFunction::evaluate(int cell, std::span<const double> xhat) const {
  const auto& e = *space->reffe();
  const int nd = e.num_dofs();
  const int nc = e.num_components();
  std::vector<double> vals(sz(nd * nc));
  e.evaluate(xhat, vals.data(), nullptr);
  const auto dofs = space->cell_dofs(cell);
  Value out = Value::zero(e.value_shape());
  for (int i = 0; i < nd; ++i) {
    const double u = dof(dofs[sz(i)]);
    for (int k = 0; k < nc; ++k) out[k] += u * vals[sz(i * nc + k)];
  }
  if (e.conformity() == Conformity::HDiv) {
    const auto& m = *space->model();
    double det = 1.0;
    for (int a = 0; a < m.dim(); ++a) det *= m.cell_size(a);
    for (int a = 0; a < m.dim(); ++a) out[a] *= m.cell_size(a) / det;
  }
  return out;
}

FEFunction fe_function(const TrialFESpace& trial, std::vector<double> free_values) {
  CARTFE_THROW_IF(static_cast<int>(free_values.size()) != trial.space()->num_free(), InvalidArgument,
                  "free value count does not match the space");
  return FEFunction{trial.space(), std::move(free_values),
                    std::vector<double>(trial.dirichlet_values().begin(), trial.dirichlet_values().end())};
}

FEFunction zero_function(const TrialFESpace& trial) {
  return fe_function(trial, std::vector<double>(sz(trial.space()->num_free()), 0.0));
}

FEFunction interpolate(const PointFn& f, const TrialFESpace& trial) {
  FEFunction out = zero_function(trial);
  const auto& V = *trial.space();
  for (int k = 0; k < V.num_free(); ++k) {
    const auto [c, i] = V.free_location(k);
    out.free_values[sz(k)] = V.dof_functional(f, c, i);
  }
  return out;
}

FEFunction interpolate_everywhere(const PointFn& f, const SpacePtr& space) {
  TrialFESpace trial(space);
  FEFunction out = interpolate(f, trial);
  for (int k = 0; k < space->num_constrained(); ++k) {
    const auto [c, i] = space->constrained_location(k);
    out.constrained_values[sz(k)] = space->dof_functional(f, c, i);
  }
  return out;
}

double integrate_function(const FEFunction& f) {
  const auto& V = *f.space;
  const auto& e = *V.reffe();
  CARTFE_THROW_IF(!(e.value_shape() == ValueShape::scalar()), KindError, "integrate_function needs a scalar field");
  const auto& m = *V.model();
  const auto rule = gauss_rule(m.dim(), 2 * e.order() + 2);
  const int nd = e.num_dofs();
  const int nq = rule.size();
  std::vector<double> tab(sz(nd * nq));
  e.evaluate(rule.points, tab.data(), nullptr);
  // Integral of each basis function over the reference cell.
  std::vector<double> basis_int(sz(nd), 0.0);
  for (int i = 0; i < nd; ++i)
    for (int q = 0; q < nq; ++q) basis_int[sz(i)] += rule.weights[sz(q)] * tab[sz(i * nq + q)];
  const double det = m.cell_measure();
  double total = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto dofs = V.cell_dofs(c);
    double s = 0.0;
    for (int i = 0; i < nd; ++i) s += f.dof(dofs[sz(i)]) * basis_int[sz(i)];
    total += s * det;
  }
  return total;
}

FEFunction zero_mean_postshift(const FEFunction& f) {
  CARTFE_THROW_IF(f.space->conformity() == Conformity::HDiv, InvalidArgument,
                  "zero-mean shift applies to Lagrangian fields");
  const auto& m = *f.space->model();
  double vol = 1.0;
  for (int a = 0; a < m.dim(); ++a) vol *= m.box()[sz(2 * a + 1)] - m.box()[sz(2 * a)];
  const double mean = integrate_function(f) / vol;
  // Nodal Lagrangian dofs reproduce constants with every dof equal to it.
  FEFunction out = f;
  for (double& v : out.free_values) v -= mean;
  for (double& v : out.constrained_values) v -= mean;
  return out;
}

// ---------------------------------------------------------------------------

MultiFieldSpace::MultiFieldSpace(std::vector<TrialPtr> fields) : fields_(std::move(fields)) {
  CARTFE_THROW_IF(fields_.empty(), InvalidArgument, "a multi-field space needs at least one field");
  for (const auto& f : fields_) {
    CARTFE_THROW_IF(!f, InvalidArgument, "null field space");
    CARTFE_THROW_IF(f->space()->model() != fields_[0]->space()->model(), InvalidArgument,
                    "all fields of a multi-field space must share one model");
    offsets_.push_back(offsets_.back() + f->space()->num_free());
  }
}

MultiFieldFEFunction unpack(const MultiFieldSpace& space, std::span<const double> x) {
  CARTFE_THROW_IF(static_cast<int>(x.size()) != space.num_free(), InvalidArgument,
                  "vector length does not match the multi-field space");
  MultiFieldFEFunction out;
  for (int f = 0; f < space.num_fields(); ++f) {
    const auto begin = x.begin() + space.offset(f);
    const auto end = x.begin() + space.offset(f + 1);
    out.push_back(fe_function(space.field(f), std::vector<double>(begin, end)));
  }
  return out;
}

std::vector<double> pack(const MultiFieldSpace& space, const MultiFieldFEFunction& fields) {
  CARTFE_THROW_IF(static_cast<int>(fields.size()) != space.num_fields(), InvalidArgument, "field count mismatch");
  std::vector<double> x;
  x.reserve(sz(space.num_free()));
  for (const auto& f : fields) x.insert(x.end(), f.free_values.begin(), f.free_values.end());
  CARTFE_THROW_IF(static_cast<int>(x.size()) != space.num_free(), InvalidArgument, "field sizes do not match the space");
  return x;
}

}  // namespace cartfe
