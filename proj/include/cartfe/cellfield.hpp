#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "cartfe/detail/eval.hpp"
#include "cartfe/fespace.hpp"

namespace cartfe {

/// A lazily evaluated field over cells or facets: the vocabulary weak forms
/// are written in. Cheap to copy (shared immutable expression tree).
///
/// Fields built from test or trial basis functions carry that dependence;
/// sums require equal dependence and products may not combine two
/// test-dependent (or two trial-dependent) factors.
class CellField {
public:
  CellField(double c);        // NOLINT: constants convert implicitly
  CellField(const Value& v);  // NOLINT
  explicit CellField(std::shared_ptr<const detail::Node> node);

  const detail::Node& node() const noexcept { return *node_; }
  const std::shared_ptr<const detail::Node>& node_ptr() const noexcept { return node_; }
  bool has_test() const noexcept { return node_->test; }
  bool has_trial() const noexcept { return node_->trial; }

private:
  std::shared_ptr<const detail::Node> node_;
};

/// Fields of a multi-field argument; a single field converts to CellField.
class Fields : public std::vector<CellField> {
public:
  using std::vector<CellField>::vector;
  operator const CellField&() const;  // NOLINT
};

// Leaves ------------------------------------------------------------------

CellField constant(const Value& v);
/// Analytic field of the physical coordinate; the gradient is optional but
/// required for gradient() of this field.
CellField function_field(PointFn f, PointFn gradient = {});
CellField physical_coordinate();
CellField identity_tensor(int dim);
/// Unit normal on a boundary (outward) or skeleton (out of the plus cell).
CellField get_normal_vector(const DomainPtr& domain);
CellField fe_field(const FEFunction& f);
Fields fe_fields(const MultiFieldFEFunction& f);

enum class BasisRole { Test, Trial };
CellField basis_field(BasisRole role, int field, SpacePtr space);
Fields basis_fields(BasisRole role, const MultiFieldSpace& space);

// Differential operators ----------------------------------------------------

/// Gradient in Jacobian layout: for vector u, entry (a, b) = d u_a / d x_b.
CellField gradient(const CellField& f);
CellField symmetric_gradient(const CellField& f);
CellField divergence(const CellField& f);
inline CellField grad(const CellField& f) { return gradient(f); }
inline CellField eps(const CellField& f) { return symmetric_gradient(f); }

// Algebra -------------------------------------------------------------------

CellField operator+(const CellField& a, const CellField& b);
CellField operator-(const CellField& a, const CellField& b);
CellField operator-(const CellField& a);
/// scalar * any, vector * vector (dot), tensor * vector, tensor * tensor.
CellField operator*(const CellField& a, const CellField& b);
CellField operator/(const CellField& a, double s);
/// Full contraction (a : b for tensors).
CellField inner(const CellField& a, const CellField& b);
CellField outer(const CellField& a, const CellField& b);
CellField transpose(const CellField& a);
CellField trace(const CellField& a);
CellField norm(const CellField& a);

// Skeleton --------------------------------------------------------------------

/// Restriction to the plus (cell with smaller id) or minus side.
CellField plus(const CellField& f);
CellField minus(const CellField& f);

struct SkeletonPair {
  CellField plus;
  CellField minus;
};
SkeletonPair restrict(const CellField& f, const DomainPtr& skeleton);

/// jump(f) = f+ - f-, mean(f) = (f+ + f-)/2. The normal field reads n+ on
/// both sides, so jump(v*n) = (v+ - v-) n+ and jump(n) = 0.
CellField jump(const SkeletonPair& p);
CellField mean(const SkeletonPair& p);
CellField jump(const CellField& f);
CellField mean(const CellField& f);

// Pointwise laws ---------------------------------------------------------------

using LawFn = std::function<Value(std::span<const Value>)>;

/// A pointwise constitutive law with a fixed number of arguments.
class Law {
public:
  Law(std::string name, int arity, LawFn fn) : name_(std::move(name)), arity_(arity), fn_(std::move(fn)) {}
  const std::string& name() const noexcept { return name_; }
  int arity() const noexcept { return arity_; }
  const LawFn& fn() const noexcept { return fn_; }
  /// Throws ArityError when the argument count differs from arity().
  CellField operator()(std::vector<CellField> args) const;
  template <class... A>
  CellField operator()(const CellField& a0, const A&... rest) const {
    return (*this)(std::vector<CellField>{a0, CellField(rest)...});
  }

private:
  std::string name_;
  int arity_;
  LawFn fn_;
};

namespace detail {
template <class F, class R, class... Args>
Law make_law_impl(std::string name, F f, R (F::*)(Args...) const) {
  constexpr int n = static_cast<int>(sizeof...(Args));
  return Law(std::move(name), n, [f](std::span<const Value> v) -> Value {
    return [&]<std::size_t... I>(std::index_sequence<I...>) { return Value(f(v[I]...)); }(std::make_index_sequence<n>{});
  });
}
}  // namespace detail

/// Wrap a callable taking Values, e.g. [](const Value& x, const Value& u) {...}.
template <class F>
Law make_law(std::string name, F f) {
  return detail::make_law_impl(std::move(name), f, &F::operator());
}

CellField pointwise_law(const Law& law, std::vector<CellField> args);

// Integration -----------------------------------------------------------------

/// A domain plus a quadrature rule (volume rule on interiors, facet rule
/// embedded into each local facet on boundaries and skeletons).
class Measure {
public:
  Measure(DomainPtr domain, int degree);
  /// Explicit rule of the domain's item dimension (used for sampling).
  Measure(DomainPtr domain, QuadratureRule rule);

  const DomainPtr& domain() const noexcept { return domain_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  /// Points in the reference cell for a given local facet (-1: volume).
  const QuadratureRule& cell_rule(int local_facet) const;

private:
  DomainPtr domain_;
  QuadratureRule rule_;
  std::vector<QuadratureRule> facet_rules_;
};

inline Measure measure(const DomainPtr& domain, int degree) { return Measure(domain, degree); }

/// Context for one item; caller provides layouts when basis fields appear.
EvalContext make_context(const Measure& m, int item, Workspace& ws, const ElementLayout* test = nullptr,
                         const ElementLayout* trial = nullptr);
/// Quadrature weights times the item Jacobian (cell volume or facet measure).
void item_weights(const Measure& m, int item, std::vector<double>& w);

/// Evaluate at the measure's points of one item.
FieldBlock evaluate(const CellField& f, const EvalContext& ctx);

/// Per-item integrals of a scalar field without basis dependence.
std::vector<double> integrate(const CellField& f, const Measure& m);
double integrate_sum(const CellField& f, const Measure& m);

}  // namespace cartfe
