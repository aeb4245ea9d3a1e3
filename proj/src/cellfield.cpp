#include "cartfe/cellfield.hpp"

#include <algorithm>
#include <cmath>

#include "cartfe/errors.hpp"

namespace cartfe {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

}  // namespace

// Buffers and caches ---------------------------------------------------------

FieldBlock::FieldBlock(Workspace& ws, ValueShape shape, int npts, BasisRange test, BasisRange trial)
    : ws_(&ws), shape_(shape), ncomp_(shape.size()), npts_(npts), test_(test), trial_(trial) {
  buf_ = ws.take(sz(test.count) * sz(trial.count) * sz(npts) * sz(ncomp_));
}

FieldBlock::FieldBlock(FieldBlock&& o) noexcept
    : ws_(o.ws_), shape_(o.shape_), ncomp_(o.ncomp_), npts_(o.npts_), test_(o.test_), trial_(o.trial_),
      buf_(std::move(o.buf_)) {
  o.ws_ = nullptr;
}

FieldBlock& FieldBlock::operator=(FieldBlock&& o) noexcept {
  if (this != &o) {
    if (ws_ && buf_.capacity() > 0) ws_->give(std::move(buf_));
    ws_ = o.ws_;
    shape_ = o.shape_;
    ncomp_ = o.ncomp_;
    npts_ = o.npts_;
    test_ = o.test_;
    trial_ = o.trial_;
    buf_ = std::move(o.buf_);
    o.ws_ = nullptr;
  }
  return *this;
}

FieldBlock::~FieldBlock() {
  if (ws_ && buf_.capacity() > 0) ws_->give(std::move(buf_));
}

std::vector<double> Workspace::take(std::size_t n) {
  if (pool_.empty()) return std::vector<double>(n, 0.0);
  std::vector<double> v = std::move(pool_.back());
  pool_.pop_back();
  v.assign(n, 0.0);
  return v;
}

void Workspace::give(std::vector<double>&& v) { pool_.push_back(std::move(v)); }

const ShapeTables& Workspace::tables(const RefElemPtr& elem, const QuadratureRule& rule) {
  const auto key = std::make_pair(elem.get(), rule.id);
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second.second;
  ShapeTables t;
  t.ndofs = elem->num_dofs();
  t.npts = rule.size();
  t.ncomp = elem->num_components();
  t.dim = elem->dim();
  t.values.resize(sz(t.ndofs * t.npts * t.ncomp));
  t.grads.resize(t.values.size() * sz(t.dim));
  elem->evaluate(rule.points, t.values.data(), t.grads.data());
  auto [pos, ok] = tables_.emplace(key, std::make_pair(elem, std::move(t)));
  return pos->second.second;
}

int EvalContext::active_side() const {
  if (side >= 0) return side;
  if (nsides == 1) return 0;
  throw DomainError("cell-based field evaluated on the skeleton without plus/minus/jump/mean");
}

namespace detail {

void check_domain(const Node& n, const EvalContext& ctx) {
  if (n.domain != 0 && n.domain != ctx.domain->id()) {
    throw DomainError("field is bound to a different integration domain than the one it is evaluated on");
  }
}

namespace {

enum class FieldOp { Value, Gradient, SymGradient, Divergence };

ValueShape op_shape(ValueShape s, FieldOp op, int d) {
  switch (op) {
    case FieldOp::Value: return s;
    case FieldOp::Gradient:
      if (s.kind == ValueKind::Scalar) return ValueShape::vector(d);
      if (s.kind == ValueKind::Vector) return ValueShape::tensor(d);
      throw KindError("gradient of a tensor field is not supported");
    case FieldOp::SymGradient:
      if (s.kind != ValueKind::Vector) throw KindError("symmetric gradient needs a vector field");
      return ValueShape::tensor(d);
    case FieldOp::Divergence:
      if (s.kind != ValueKind::Vector) throw KindError("divergence needs a vector field");
      return ValueShape::scalar();
  }
  return s;
}

Value load(ValueShape s, const double* p) { return Value::from_components(s, p); }

void store(const Value& v, double* p) {
  for (int k = 0; k < v.size(); ++k) p[k] = v[k];
}

// Physical op of basis function i at point q, written to out.
void mapped_basis(const ShapeTables& t, bool hdiv, const CellMap& map, FieldOp op, int i, int q, double* out) {
  const int d = t.dim;
  const int nc = t.ncomp;
  double scale[kMaxDim];
  for (int a = 0; a < d; ++a) scale[a] = hdiv ? map.h[sz(a)] / map.det : 1.0;
  const double* v = t.values.data() + (sz(i) * sz(t.npts) + sz(q)) * sz(nc);
  const double* g = t.grads.data() + ((sz(i) * sz(t.npts) + sz(q)) * sz(nc)) * sz(d);
  switch (op) {
    case FieldOp::Value:
      for (int c = 0; c < nc; ++c) out[c] = (nc == 1 ? 1.0 : scale[c]) * v[c];
      return;
    case FieldOp::Gradient:
      for (int c = 0; c < nc; ++c) {
        const double s = nc == 1 ? 1.0 : scale[c];
        for (int b = 0; b < d; ++b) out[c * d + b] = s * g[c * d + b] / map.h[sz(b)];
      }
      return;
    case FieldOp::SymGradient: {
      double tmp[kMaxDim * kMaxDim];
      for (int c = 0; c < nc; ++c)
        for (int b = 0; b < d; ++b) tmp[c * d + b] = scale[c] * g[c * d + b] / map.h[sz(b)];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) out[a * d + b] = 0.5 * (tmp[a * d + b] + tmp[b * d + a]);
      return;
    }
    case FieldOp::Divergence: {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += scale[a] * g[a * d + a] / map.h[sz(a)];
      out[0] = s;
      return;
    }
  }
}

// Leaves ----------------------------------------------------------------------

class ConstantNode final : public Node {
public:
  explicit ConstantNode(Value v) : v_(v) {}
  FieldBlock eval(const EvalContext& ctx) const override {
    FieldBlock b(*ctx.ws, v_.shape(), ctx.npts, {}, {});
    for (int q = 0; q < ctx.npts; ++q) store(v_, b.at(0, 0, q));
    return b;
  }
  NodeKind kind() const noexcept override { return NodeKind::Constant; }
  std::optional<double> scalar_constant() const noexcept override {
    if (v_.kind() == ValueKind::Scalar) return v_[0];
    return std::nullopt;
  }
  const Value& value() const noexcept { return v_; }

private:
  Value v_;
};

// Gradient of a constant: zeros of the right shape for the domain dimension.
class ZeroGradientNode final : public Node {
public:
  explicit ZeroGradientNode(ValueKind k) : k_(k) {}
  FieldBlock eval(const EvalContext& ctx) const override {
    const int d = ctx.domain->dim();
    const ValueShape s = k_ == ValueKind::Scalar ? ValueShape::vector(d) : ValueShape::tensor(d);
    return FieldBlock(*ctx.ws, s, ctx.npts, {}, {});
  }

private:
  ValueKind k_;
};

void physical_points(const EvalContext& ctx, std::vector<double>& x) {
  const int s = ctx.side >= 0 ? ctx.side : 0;
  const auto& side = ctx.sides[s];
  const int d = ctx.domain->dim();
  x.resize(sz(ctx.npts * d));
  for (int q = 0; q < ctx.npts; ++q)
    for (int a = 0; a < d; ++a)
      x[sz(q * d + a)] = side.map.origin[sz(a)] + side.map.h[sz(a)] * side.rule->points[sz(q * d + a)];
}

class FunctionNode final : public Node {
public:
  FunctionNode(PointFn f, PointFn g) : f_(std::move(f)), g_(std::move(g)) {}
  FieldBlock eval(const EvalContext& ctx) const override {
    thread_local std::vector<double> x;
    physical_points(ctx, x);
    const int d = ctx.domain->dim();
    FieldBlock b;
    for (int q = 0; q < ctx.npts; ++q) {
      const Value v = f_(std::span<const double>(x.data() + sz(q * d), sz(d)));
      if (q == 0) b = FieldBlock(*ctx.ws, v.shape(), ctx.npts, {}, {});
      CARTFE_THROW_IF(!(v.shape() == b.shape()), KindError, "analytic function changes its value kind");
      store(v, b.at(0, 0, q));
    }
    return b;
  }
  NodeKind kind() const noexcept override { return NodeKind::Leaf; }
  const PointFn& gradient_fn() const noexcept { return g_; }

private:
  PointFn f_, g_;
};

class CoordinateNode final : public Node {
public:
  FieldBlock eval(const EvalContext& ctx) const override {
    thread_local std::vector<double> x;
    physical_points(ctx, x);
    const int d = ctx.domain->dim();
    FieldBlock b(*ctx.ws, ValueShape::vector(d), ctx.npts, {}, {});
    std::copy(x.begin(), x.end(), b.data());
    return b;
  }
  NodeKind kind() const noexcept override { return NodeKind::Leaf; }
};

class NormalNode final : public Node {
public:
  explicit NormalNode(std::size_t dom) { domain = dom; }
  FieldBlock eval(const EvalContext& ctx) const override {
    CARTFE_THROW_IF(ctx.domain->kind() == DomainKind::Interior, UnsupportedDomainError,
                    "normal vector evaluated on an interior domain");
    const int d = ctx.domain->dim();
    FieldBlock b(*ctx.ws, ValueShape::vector(d), ctx.npts, {}, {});
    const auto n = ctx.domain->normal(ctx.item);
    for (int q = 0; q < ctx.npts; ++q)
      for (int a = 0; a < d; ++a) b.at(0, 0, q)[a] = n[sz(a)];
    return b;
  }
  NodeKind kind() const noexcept override { return NodeKind::Leaf; }
};

class FEFieldNode final : public Node {
public:
  FEFieldNode(std::shared_ptr<const FEFunction> f, FieldOp op) : f_(std::move(f)), op_(op) {
    shape_ = op_shape(f_->space->value_shape(), op, f_->space->model()->dim());
  }
  FieldBlock eval(const EvalContext& ctx) const override {
    const auto& V = *f_->space;
    CARTFE_THROW_IF(V.model() != ctx.domain->model(), DomainError, "FE function lives on a different model");
    const int s = ctx.active_side();
    const auto& side = ctx.sides[s];
    const auto& t = ctx.ws->tables(V.reffe(), *side.rule);
    const bool hdiv = V.conformity() == Conformity::HDiv;
    const auto dofs = V.cell_dofs(side.cell);
    FieldBlock b(*ctx.ws, shape_, ctx.npts, {}, {});
    const int nk = shape_.size();
    double tmp[kMaxDim * kMaxDim];
    for (int i = 0; i < t.ndofs; ++i) {
      const double u = f_->dof(dofs[sz(i)]);
      if (u == 0.0) continue;
      for (int q = 0; q < ctx.npts; ++q) {
        mapped_basis(t, hdiv, side.map, op_, i, q, tmp);
        double* o = b.at(0, 0, q);
        for (int k = 0; k < nk; ++k) o[k] += u * tmp[k];
      }
    }
    return b;
  }
  NodeKind kind() const noexcept override { return NodeKind::Leaf; }
  const std::shared_ptr<const FEFunction>& function() const noexcept { return f_; }
  FieldOp op() const noexcept { return op_; }

private:
  std::shared_ptr<const FEFunction> f_;
  FieldOp op_;
  ValueShape shape_;
};

class BasisNode final : public Node {
public:
  BasisNode(BasisRole role, int field, SpacePtr space, FieldOp op)
      : role_(role), field_(field), space_(std::move(space)), op_(op) {
    shape_ = op_shape(space_->value_shape(), op, space_->model()->dim());
    test = role == BasisRole::Test;
    trial = role == BasisRole::Trial;
  }
  FieldBlock eval(const EvalContext& ctx) const override {
    const ElementLayout* layout = role_ == BasisRole::Test ? ctx.test : ctx.trial;
    CARTFE_THROW_IF(layout == nullptr, ArityError, "basis field evaluated outside of assembly");
    CARTFE_THROW_IF(field_ >= layout->num_fields, ArityError, "basis field index exceeds the multi-field size");
    CARTFE_THROW_IF(space_->model() != ctx.domain->model(), DomainError, "space lives on a different model");
    const int s = ctx.active_side();
    const auto& side = ctx.sides[s];
    const auto& t = ctx.ws->tables(space_->reffe(), *side.rule);
    const bool hdiv = space_->conformity() == Conformity::HDiv;
    BasisRange r{layout->offset(s, field_), t.ndofs, true};
    FieldBlock b = role_ == BasisRole::Test ? FieldBlock(*ctx.ws, shape_, ctx.npts, r, {})
                                            : FieldBlock(*ctx.ws, shape_, ctx.npts, {}, r);
    for (int i = 0; i < t.ndofs; ++i) {
      for (int q = 0; q < ctx.npts; ++q) {
        double* o = role_ == BasisRole::Test ? b.at(i, 0, q) : b.at(0, i, q);
        mapped_basis(t, hdiv, side.map, op_, i, q, o);
      }
    }
    return b;
  }
  NodeKind kind() const noexcept override { return NodeKind::Leaf; }
  BasisRole role() const noexcept { return role_; }
  int field() const noexcept { return field_; }
  const SpacePtr& space() const noexcept { return space_; }
  FieldOp op() const noexcept { return op_; }

private:
  BasisRole role_;
  int field_;
  SpacePtr space_;
  FieldOp op_;
  ValueShape shape_;
};

// Combinators -------------------------------------------------------------------

enum class UOp { Neg, Transpose, Trace, Norm, SymPart };
enum class BOp { Add, Sub, Mul, Inner, Outer };

Value apply(UOp op, const Value& a) {
  switch (op) {
    case UOp::Neg: return -a;
    case UOp::Transpose: return transpose(a);
    case UOp::Trace: return Value(trace(a));
    case UOp::Norm: return Value(norm(a));
    case UOp::SymPart: return symmetric_part(a);
  }
  return a;
}

Value apply(BOp op, const Value& a, const Value& b) {
  switch (op) {
    case BOp::Add: return a + b;
    case BOp::Sub: return a - b;
    case BOp::Mul: return a * b;
    case BOp::Inner: return Value(inner(a, b));
    case BOp::Outer: return outer(a, b);
  }
  return a;
}

// Index of result entry i inside a child's range, -1 if outside.
inline int child_index(const BasisRange& child, const BasisRange& res, int i) {
  if (!child.active) return 0;
  const int k = res.offset + i - child.offset;
  return (k >= 0 && k < child.count) ? k : -1;
}

BasisRange merge(const BasisRange& a, const BasisRange& b) {
  if (!a.active) return b;
  if (!b.active) return a;
  const int lo = std::min(a.offset, b.offset);
  const int hi = std::max(a.end(), b.end());
  return {lo, hi - lo, true};
}

class UnaryNode final : public Node {
public:
  UnaryNode(UOp op, std::shared_ptr<const Node> a) : op_(op), a_(std::move(a)) {
    test = a_->test;
    trial = a_->trial;
    domain = a_->domain;
  }
  FieldBlock eval(const EvalContext& ctx) const override {
    FieldBlock A = a_->eval(ctx);
    const ValueShape s = apply(op_, Value::zero(A.shape())).shape();
    FieldBlock out(*ctx.ws, s, ctx.npts, A.test(), A.trial());
    if (op_ == UOp::Neg) {
      for (std::size_t k = 0; k < A.size(); ++k) out.data()[k] = -A.data()[k];
      return out;
    }
    const std::size_t na = sz(A.ncomp()), no = sz(out.ncomp());
    const std::size_t n = A.size() / na;
    for (std::size_t k = 0; k < n; ++k) store(apply(op_, load(A.shape(), A.data() + k * na)), out.data() + k * no);
    return out;
  }
  NodeKind kind() const noexcept override { return op_ == UOp::Neg ? NodeKind::Neg : NodeKind::Unary; }
  int num_children() const noexcept override { return 1; }
  const Node* child(int) const noexcept override { return a_.get(); }
  UOp op() const noexcept { return op_; }
  const std::shared_ptr<const Node>& arg() const noexcept { return a_; }

private:
  UOp op_;
  std::shared_ptr<const Node> a_;
};

class BinaryNode final : public Node {
public:
  BinaryNode(BOp op, std::shared_ptr<const Node> a, std::shared_ptr<const Node> b)
      : op_(op), a_(std::move(a)), b_(std::move(b)) {
    test = a_->test || b_->test;
    trial = a_->trial || b_->trial;
    if (a_->domain != 0 && b_->domain != 0 && a_->domain != b_->domain) {
      throw DomainError("cannot combine fields bound to different integration domains");
    }
    domain = a_->domain != 0 ? a_->domain : b_->domain;
  }

  FieldBlock eval(const EvalContext& ctx) const override {
    FieldBlock A = a_->eval(ctx);
    FieldBlock B = b_->eval(ctx);
    const ValueShape s = apply(op_, Value::zero(A.shape()), Value::zero(B.shape())).shape();
    const BasisRange rt = merge(A.test(), B.test());
    const BasisRange rr = merge(A.trial(), B.trial());
    FieldBlock out(*ctx.ws, s, ctx.npts, rt, rr);
    const int npts = ctx.npts;

    // Same layout on both sides: plain elementwise sum/difference.
    if ((op_ == BOp::Add || op_ == BOp::Sub) && A.test() == B.test() && A.trial() == B.trial() &&
        A.shape() == B.shape()) {
      const double sg = op_ == BOp::Add ? 1.0 : -1.0;
      for (std::size_t k = 0; k < A.size(); ++k) out.data()[k] = A.data()[k] + sg * B.data()[k];
      return out;
    }
    // Scalar coefficient without basis dependence times anything.
    if (op_ == BOp::Mul && (A.shape().kind == ValueKind::Scalar || B.shape().kind == ValueKind::Scalar)) {
      const bool a_coef = A.shape().kind == ValueKind::Scalar && !A.test().active && !A.trial().active;
      const bool b_coef = B.shape().kind == ValueKind::Scalar && !B.test().active && !B.trial().active;
      if (a_coef || b_coef) {
        const FieldBlock& C = a_coef ? A : B;
        const FieldBlock& F = a_coef ? B : A;
        const int nc = F.ncomp();
        for (int i = 0; i < F.test().count; ++i)
          for (int j = 0; j < F.trial().count; ++j)
            for (int q = 0; q < npts; ++q) {
              const double c = C.at(0, 0, q)[0];
              const double* f = F.at(i, j, q);
              double* o = out.at(i, j, q);
              for (int k = 0; k < nc; ++k) o[k] = c * f[k];
            }
        return out;
      }
      // Scalar basis field times a coefficient field of any shape (v * n).
      const bool a_plain = !A.test().active && !A.trial().active;
      const bool b_plain = !B.test().active && !B.trial().active;
      if ((A.shape().kind == ValueKind::Scalar && b_plain) || (B.shape().kind == ValueKind::Scalar && a_plain)) {
        const bool a_scalar = A.shape().kind == ValueKind::Scalar && b_plain;
        const FieldBlock& S = a_scalar ? A : B;
        const FieldBlock& F = a_scalar ? B : A;
        const int nc = F.ncomp();
        for (int i = 0; i < S.test().count; ++i)
          for (int j = 0; j < S.trial().count; ++j)
            for (int q = 0; q < npts; ++q) {
              const double c = S.at(i, j, q)[0];
              const double* f = F.at(0, 0, q);
              double* o = out.at(i, j, q);
              for (int k = 0; k < nc; ++k) o[k] = c * f[k];
            }
        return out;
      }
    }
    const Value za = Value::zero(A.shape()), zb = Value::zero(B.shape());
    for (int i = 0; i < rt.count; ++i) {
      const int ai = child_index(A.test(), rt, i), bi = child_index(B.test(), rt, i);
      for (int j = 0; j < rr.count; ++j) {
        const int aj = child_index(A.trial(), rr, j), bj = child_index(B.trial(), rr, j);
        const bool ha = ai >= 0 && aj >= 0, hb = bi >= 0 && bj >= 0;
        for (int q = 0; q < npts; ++q) {
          const Value va = ha ? load(A.shape(), A.at(ai, aj, q)) : za;
          const Value vb = hb ? load(B.shape(), B.at(bi, bj, q)) : zb;
          store(apply(op_, va, vb), out.at(i, j, q));
        }
      }
    }
    return out;
  }

  NodeKind kind() const noexcept override {
    switch (op_) {
      case BOp::Add: return NodeKind::Add;
      case BOp::Sub: return NodeKind::Sub;
      case BOp::Mul: return NodeKind::Mul;
      case BOp::Inner: return NodeKind::Inner;
      case BOp::Outer: return NodeKind::Binary;
    }
    return NodeKind::Binary;
  }
  int num_children() const noexcept override { return 2; }
  const Node* child(int i) const noexcept override { return i == 0 ? a_.get() : b_.get(); }
  BOp op() const noexcept { return op_; }
  const std::shared_ptr<const Node>& lhs() const noexcept { return a_; }
  const std::shared_ptr<const Node>& rhs() const noexcept { return b_; }

private:
  BOp op_;
  std::shared_ptr<const Node> a_, b_;
};

class LawNode final : public Node {
public:
  LawNode(Law law, std::vector<std::shared_ptr<const Node>> args) : law_(std::move(law)), args_(std::move(args)) {
    // Several basis-dependent arguments (du and grad du) are paired by basis
    // index, so the law must be linear in them jointly.
    for (const auto& a : args_) {
      test = test || a->test;
      trial = trial || a->trial;
      if (a->domain != 0 && domain != 0 && a->domain != domain) {
        throw DomainError("law arguments are bound to different integration domains");
      }
      if (a->domain != 0) domain = a->domain;
    }
  }
  FieldBlock eval(const EvalContext& ctx) const override {
    std::vector<FieldBlock> blocks;
    blocks.reserve(args_.size());
    BasisRange rt, rr;
    for (const auto& a : args_) {
      blocks.push_back(a->eval(ctx));
      rt = merge(rt, blocks.back().test());
      rr = merge(rr, blocks.back().trial());
    }
    std::vector<Value> vals(args_.size());
    FieldBlock out;
    for (int i = 0; i < rt.count; ++i)
      for (int j = 0; j < rr.count; ++j)
        for (int q = 0; q < ctx.npts; ++q) {
          for (std::size_t k = 0; k < blocks.size(); ++k) {
            const auto& bk = blocks[k];
            const int ii = child_index(bk.test(), rt, i), jj = child_index(bk.trial(), rr, j);
            vals[k] = (ii >= 0 && jj >= 0) ? load(bk.shape(), bk.at(ii, jj, q)) : Value::zero(bk.shape());
          }
          const Value r = law_.fn()(vals);
          if (i == 0 && j == 0 && q == 0) out = FieldBlock(*ctx.ws, r.shape(), ctx.npts, rt, rr);
          CARTFE_THROW_IF(!(r.shape() == out.shape()), KindError,
                          "law \"" + law_.name() + "\" returns values of varying kind");
          store(r, out.at(i, j, q));
        }
    return out;
  }
  NodeKind kind() const noexcept override { return NodeKind::Law; }

private:
  Law law_;
  std::vector<std::shared_ptr<const Node>> args_;
};

class SideNode final : public Node {
public:
  SideNode(std::shared_ptr<const Node> a, int side, std::size_t dom) : a_(std::move(a)), side_(side) {
    test = a_->test;
    trial = a_->trial;
    if (a_->domain != 0 && dom != 0 && a_->domain != dom) {
      throw DomainError("field restricted to a skeleton it is not bound to");
    }
    domain = dom != 0 ? dom : a_->domain;
  }
  FieldBlock eval(const EvalContext& ctx) const override {
    CARTFE_THROW_IF(ctx.domain->kind() != DomainKind::Skeleton, DomainError,
                    "plus/minus restrictions are only defined on skeleton domains");
    EvalContext c2 = ctx;
    c2.side = side_;
    return a_->eval(c2);
  }
  NodeKind kind() const noexcept override { return NodeKind::Side; }
  int num_children() const noexcept override { return 1; }
  const Node* child(int) const noexcept override { return a_.get(); }
  const std::shared_ptr<const Node>& arg() const noexcept { return a_; }
  int side() const noexcept { return side_; }

private:
  std::shared_ptr<const Node> a_;
  int side_;
};

std::optional<Value> constant_value(const Node& n) {
  if (const auto* c = dynamic_cast<const ConstantNode*>(&n)) return c->value();
  return std::nullopt;
}

CellField make_binary(BOp op, const CellField& a, const CellField& b) {
  const Node& na = a.node();
  const Node& nb = b.node();
  if (op == BOp::Add || op == BOp::Sub) {
    if (na.test != nb.test || na.trial != nb.trial) {
      throw ArityError(std::string("cannot ") + (op == BOp::Add ? "add" : "subtract") +
                       " fields with different test/trial dependence");
    }
  } else {
    CARTFE_THROW_IF(na.test && nb.test, ArityError, "product of two test-dependent fields");
    CARTFE_THROW_IF(na.trial && nb.trial, ArityError, "product of two trial-dependent fields");
  }
  const auto ca = constant_value(na);
  const auto cb = constant_value(nb);
  if (ca && cb) return CellField(std::make_shared<ConstantNode>(apply(op, *ca, *cb)));
  return CellField(std::make_shared<BinaryNode>(op, a.node_ptr(), b.node_ptr()));
}

CellField with_op(const CellField& f, FieldOp op, const char* what) {
  const Node& n = f.node();
  if (const auto* fe = dynamic_cast<const FEFieldNode*>(&n)) {
    if (fe->op() != FieldOp::Value) throw InvalidArgument(std::string(what) + " of a derivative field");
    return CellField(std::make_shared<FEFieldNode>(fe->function(), op));
  }
  if (const auto* bn = dynamic_cast<const BasisNode*>(&n)) {
    if (bn->op() != FieldOp::Value) throw InvalidArgument(std::string(what) + " of a derivative field");
    return CellField(std::make_shared<BasisNode>(bn->role(), bn->field(), bn->space(), op));
  }
  return CellField(std::shared_ptr<const Node>());
}

}  // namespace
}  // namespace detail

using namespace detail;

// CellField -------------------------------------------------------------------

CellField::CellField(double c) : node_(std::make_shared<ConstantNode>(Value(c))) {}
CellField::CellField(const Value& v) : node_(std::make_shared<ConstantNode>(v)) {}
CellField::CellField(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Fields::operator const CellField&() const {
  CARTFE_THROW_IF(size() != 1, ArityError,
                  "a multi-field argument with " + std::to_string(size()) + " fields used as a single field");
  return front();
}

CellField constant(const Value& v) { return CellField(v); }

CellField function_field(PointFn f, PointFn gradient) {
  CARTFE_THROW_IF(!f, InvalidArgument, "empty function");
  return CellField(std::make_shared<FunctionNode>(std::move(f), std::move(gradient)));
}

CellField physical_coordinate() { return CellField(std::make_shared<CoordinateNode>()); }

CellField identity_tensor(int dim) { return CellField(Value::identity(dim)); }

CellField get_normal_vector(const DomainPtr& domain) {
  CARTFE_THROW_IF(!domain, InvalidArgument, "null domain");
  CARTFE_THROW_IF(domain->kind() == DomainKind::Interior, UnsupportedDomainError,
                  "get_normal_vector needs a boundary or skeleton domain");
  return CellField(std::make_shared<NormalNode>(domain->id()));
}

CellField fe_field(const FEFunction& f) {
  CARTFE_THROW_IF(!f.space, InvalidArgument, "FE function without a space");
  return CellField(std::make_shared<FEFieldNode>(std::make_shared<const FEFunction>(f), FieldOp::Value));
}

Fields fe_fields(const MultiFieldFEFunction& f) {
  Fields out;
  for (const auto& fi : f) out.push_back(fe_field(fi));
  return out;
}

CellField basis_field(BasisRole role, int field, SpacePtr space) {
  CARTFE_THROW_IF(!space, InvalidArgument, "null space");
  return CellField(std::make_shared<BasisNode>(role, field, std::move(space), FieldOp::Value));
}

Fields basis_fields(BasisRole role, const MultiFieldSpace& space) {
  Fields out;
  for (int i = 0; i < space.num_fields(); ++i) out.push_back(basis_field(role, i, space.space(i)));
  return out;
}

CellField gradient(const CellField& f) {
  const Node& n = f.node();
  if (auto r = with_op(f, FieldOp::Gradient, "gradient"); r.node_ptr()) return r;
  if (const auto* fn = dynamic_cast<const FunctionNode*>(&n)) {
    if (!fn->gradient_fn()) throw MissingGradientError("analytic field has no registered gradient");
    return CellField(std::make_shared<FunctionNode>(fn->gradient_fn(), PointFn{}));
  }
  if (const auto* c = dynamic_cast<const ConstantNode*>(&n)) {
    CARTFE_THROW_IF(c->value().kind() == ValueKind::Tensor, KindError, "gradient of a tensor constant");
    return CellField(std::make_shared<ZeroGradientNode>(c->value().kind()));
  }
  if (dynamic_cast<const CoordinateNode*>(&n)) {
    // d x_a / d x_b; the dimension is only known at evaluation.
    const PointFn id = [](std::span<const double> x) {
      return Value::identity(static_cast<int>(x.size()));
    };
    return CellField(std::make_shared<FunctionNode>(id, PointFn{}));
  }
  if (const auto* s = dynamic_cast<const SideNode*>(&n)) {
    return CellField(std::make_shared<SideNode>(gradient(CellField(s->arg())).node_ptr(), s->side(), s->domain));
  }
  if (const auto* u = dynamic_cast<const UnaryNode*>(&n); u && u->op() == UOp::Neg) {
    return -gradient(CellField(u->arg()));
  }
  if (const auto* b = dynamic_cast<const BinaryNode*>(&n)) {
    if (b->op() == BOp::Add) return gradient(CellField(b->lhs())) + gradient(CellField(b->rhs()));
    if (b->op() == BOp::Sub) return gradient(CellField(b->lhs())) - gradient(CellField(b->rhs()));
    if (b->op() == BOp::Mul) {
      if (const auto c = b->lhs()->scalar_constant()) return CellField(*c) * gradient(CellField(b->rhs()));
      if (const auto c = b->rhs()->scalar_constant()) return gradient(CellField(b->lhs())) * CellField(*c);
    }
  }
  throw InvalidArgument("gradient is defined for leaves and their linear combinations only");
}

CellField symmetric_gradient(const CellField& f) {
  if (auto r = with_op(f, FieldOp::SymGradient, "symmetric gradient"); r.node_ptr()) return r;
  return CellField(std::make_shared<UnaryNode>(UOp::SymPart, gradient(f).node_ptr()));
}

CellField divergence(const CellField& f) {
  if (auto r = with_op(f, FieldOp::Divergence, "divergence"); r.node_ptr()) return r;
  if (const auto c = constant_value(f.node()); c && c->kind() != ValueKind::Vector)
    throw KindError("divergence needs a vector field");
  return trace(gradient(f));
}

CellField operator+(const CellField& a, const CellField& b) { return make_binary(BOp::Add, a, b); }
CellField operator-(const CellField& a, const CellField& b) { return make_binary(BOp::Sub, a, b); }
CellField operator*(const CellField& a, const CellField& b) { return make_binary(BOp::Mul, a, b); }
CellField operator/(const CellField& a, double s) { return make_binary(BOp::Mul, a, CellField(1.0 / s)); }
CellField inner(const CellField& a, const CellField& b) { return make_binary(BOp::Inner, a, b); }
CellField outer(const CellField& a, const CellField& b) { return make_binary(BOp::Outer, a, b); }

CellField operator-(const CellField& a) {
  if (const auto c = constant_value(a.node())) return CellField(-*c);
  return CellField(std::make_shared<UnaryNode>(UOp::Neg, a.node_ptr()));
}

CellField transpose(const CellField& a) { return CellField(std::make_shared<UnaryNode>(UOp::Transpose, a.node_ptr())); }
CellField trace(const CellField& a) { return CellField(std::make_shared<UnaryNode>(UOp::Trace, a.node_ptr())); }
CellField norm(const CellField& a) { return CellField(std::make_shared<UnaryNode>(UOp::Norm, a.node_ptr())); }

CellField plus(const CellField& f) { return CellField(std::make_shared<SideNode>(f.node_ptr(), 0, 0)); }
CellField minus(const CellField& f) { return CellField(std::make_shared<SideNode>(f.node_ptr(), 1, 0)); }

SkeletonPair restrict(const CellField& f, const DomainPtr& skeleton) {
  CARTFE_THROW_IF(!skeleton, InvalidArgument, "null domain");
  CARTFE_THROW_IF(skeleton->kind() != DomainKind::Skeleton, DomainError, "restrict needs a skeleton domain");
  return {CellField(std::make_shared<SideNode>(f.node_ptr(), 0, skeleton->id())),
          CellField(std::make_shared<SideNode>(f.node_ptr(), 1, skeleton->id()))};
}

CellField jump(const SkeletonPair& p) { return p.plus - p.minus; }
CellField mean(const SkeletonPair& p) { return 0.5 * (p.plus + p.minus); }
CellField jump(const CellField& f) { return plus(f) - minus(f); }
CellField mean(const CellField& f) { return 0.5 * (plus(f) + minus(f)); }

CellField Law::operator()(std::vector<CellField> args) const {
  if (static_cast<int>(args.size()) != arity_) {
    throw ArityError("law \"" + name_ + "\" expects " + std::to_string(arity_) + " argument(s), got " +
                     std::to_string(args.size()));
  }
  std::vector<std::shared_ptr<const Node>> nodes;
  for (const auto& a : args) nodes.push_back(a.node_ptr());
  return CellField(std::make_shared<LawNode>(*this, std::move(nodes)));
}

CellField pointwise_law(const Law& law, std::vector<CellField> args) { return law(std::move(args)); }

// Measures and integration ------------------------------------------------------

Measure::Measure(DomainPtr domain, int degree) : domain_(std::move(domain)) {
  CARTFE_THROW_IF(!domain_, InvalidArgument, "null domain");
  const int d = domain_->dim();
  *this = Measure(domain_, gauss_rule(domain_->kind() == DomainKind::Interior ? d : d - 1, degree));
}

Measure::Measure(DomainPtr domain, QuadratureRule rule) : domain_(std::move(domain)), rule_(std::move(rule)) {
  CARTFE_THROW_IF(!domain_, InvalidArgument, "null domain");
  const int d = domain_->dim();
  if (domain_->kind() == DomainKind::Interior) {
    CARTFE_THROW_IF(rule_.dim != d, InvalidArgument, "volume rule dimension mismatch");
    return;
  }
  CARTFE_THROW_IF(rule_.dim != d - 1, InvalidArgument, "facet rule dimension mismatch");
  const auto& cube = domain_->model()->cube();
  for (int lf = 0; lf < 2 * d; ++lf) facet_rules_.push_back(facet_rule(rule_, cube.facet_axis(lf), cube.facet_side(lf)));
}

const QuadratureRule& Measure::cell_rule(int local_facet) const {
  if (local_facet < 0) return rule_;
  return facet_rules_.at(sz(local_facet));
}

EvalContext make_context(const Measure& m, int item, Workspace& ws, const ElementLayout* test,
                         const ElementLayout* trial) {
  EvalContext ctx;
  const auto& dom = *m.domain();
  ctx.domain = &dom;
  ctx.item = item;
  ctx.nsides = dom.num_sides();
  for (int s = 0; s < ctx.nsides; ++s) {
    auto& side = ctx.sides[s];
    side.cell = dom.cell(item, s);
    side.local_facet = dom.kind() == DomainKind::Interior ? -1 : dom.local_facet(item, s);
    side.rule = &m.cell_rule(side.local_facet);
    side.map = dom.cell_map(side.cell);
  }
  ctx.npts = m.rule().size();
  ctx.test = test;
  ctx.trial = trial;
  ctx.ws = &ws;
  return ctx;
}

void item_weights(const Measure& m, int item, std::vector<double>& w) {
  const auto& dom = *m.domain();
  const double jac = dom.kind() == DomainKind::Interior ? dom.cell_map(dom.cell(item)).det : dom.facet_measure(item);
  w.resize(m.rule().weights.size());
  for (std::size_t q = 0; q < w.size(); ++q) w[q] = m.rule().weights[q] * jac;
}

FieldBlock evaluate(const CellField& f, const EvalContext& ctx) {
  check_domain(f.node(), ctx);
  return f.node().eval(ctx);
}

std::vector<double> integrate(const CellField& f, const Measure& m) {
  CARTFE_THROW_IF(f.has_test() || f.has_trial(), ArityError,
                  "integrate() takes fields without test/trial dependence; use the assembler");
  Workspace ws;
  std::vector<double> out(sz(m.domain()->num_items()));
  std::vector<double> w;
  for (int it = 0; it < m.domain()->num_items(); ++it) {
    const auto ctx = make_context(m, it, ws);
    const FieldBlock b = evaluate(f, ctx);
    CARTFE_THROW_IF(b.shape().kind != ValueKind::Scalar, KindError,
                    std::string("integrand must be scalar, got a ") + kind_name(b.shape().kind));
    item_weights(m, it, w);
    double s = 0.0;
    for (int q = 0; q < ctx.npts; ++q) s += w[sz(q)] * b.at(0, 0, q)[0];
    out[sz(it)] = s;
  }
  return out;
}

double integrate_sum(const CellField& f, const Measure& m) {
  const auto v = integrate(f, m);
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace cartfe
