#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cartfe/mesh.hpp"
#include "cartfe/value.hpp"

namespace cartfe {

enum class Family { QLagrangian, PLagrangian, RaviartThomas };
enum class Conformity { H1, L2, HDiv };

const char* family_name(Family f) noexcept;
const char* conformity_name(Conformity c) noexcept;

/// Where a dof lives on the reference cube and what functional defines it.
struct DofInfo {
  int face_dim = 0;    // dimension of the owning reference face
  int face_local = 0;  // local index of that face (CubeTopology order)
  int slot = 0;        // position among the owner's dofs of the same component
  int component = 0;
  /// Node where the functional samples the field (reference coordinates).
  std::array<double, kMaxDim> node{};
};

/// Shape functions on the reference cell [0,1]^d.
///
/// Tables are laid out [dof][point][component] for values and
/// [dof][point][component][axis] for gradients.
class ReferenceElement {
public:
  virtual ~ReferenceElement() = default;

  Family family() const noexcept { return family_; }
  Conformity conformity() const noexcept { return conformity_; }
  int order() const noexcept { return order_; }
  int dim() const noexcept { return dim_; }
  ValueShape value_shape() const noexcept { return shape_; }
  int num_components() const noexcept { return shape_.size(); }
  int num_dofs() const noexcept { return static_cast<int>(dofs_.size()); }
  const std::vector<DofInfo>& dofs() const noexcept { return dofs_; }
  std::string name() const;

  /// `values` needs num_dofs*npts*ncomp entries, `grads` (optional)
  /// num_dofs*npts*ncomp*dim.
  virtual void evaluate(std::span<const double> points, double* values, double* grads) const = 0;

  /// Convenience wrappers returning freshly allocated tables.
  std::vector<double> shape_values(std::span<const double> points) const;
  std::vector<double> shape_gradients(std::span<const double> points) const;

protected:
  ReferenceElement(Family f, Conformity c, int order, int dim, ValueShape shape)
      : family_(f), conformity_(c), order_(order), dim_(dim), shape_(shape) {}

  Family family_;
  Conformity conformity_;
  int order_;
  int dim_;
  ValueShape shape_;
  std::vector<DofInfo> dofs_;
};

using RefElemPtr = std::shared_ptr<const ReferenceElement>;

/// Tensor-product Lagrange on equispaced nodes, (k+1)^d nodes per component.
/// Vector elements number dofs component-major.
RefElemPtr q_lagrangian(int dim, int order, ValueShape shape = ValueShape::scalar(),
                        Conformity conformity = Conformity::H1);

/// Full polynomial space of total degree <= k (discontinuous only).
RefElemPtr p_lagrangian(int dim, int order, ValueShape shape = ValueShape::scalar());

/// Raviart-Thomas of index k: component a in Q_{k+1} along axis a and Q_k
/// along the others. Dofs sample component a at nodes whose axis-a
/// coordinate is {0, Gauss points, 1}; the ones at 0 and 1 are facet dofs.
RefElemPtr raviart_thomas(int dim, int order);

/// Contravariant Piola map for a diagonal Jacobian diag(h).
/// v = J v_hat / det J; throws GeometryError for non-positive h.
void piola_map(std::span<const double> h, std::span<const double> vhat, std::span<double> v);
/// Physical divergence from the reference divergence.
double piola_divergence(std::span<const double> h, double div_hat);

}  // namespace cartfe
