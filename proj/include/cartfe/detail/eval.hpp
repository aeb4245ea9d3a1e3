#pragma once

// Evaluation machinery shared by cell fields and the assembler. Not part of
// the stable interface.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cartfe/geometry.hpp"
#include "cartfe/quadrature.hpp"
#include "cartfe/reffe.hpp"
#include "cartfe/value.hpp"

namespace cartfe {

class Workspace;

/// Rows (test) or columns (trial) of the element layout a block covers.
/// An inactive range has a single broadcast entry.
struct BasisRange {
  int offset = 0;
  int count = 1;
  bool active = false;

  int end() const noexcept { return offset + count; }
  friend bool operator==(const BasisRange&, const BasisRange&) = default;
};

/// Values of a field at the quadrature points of one item, laid out
/// [test][trial][point][component]. Buffers come from and go back to the
/// workspace pool.
class FieldBlock {
public:
  FieldBlock() = default;
  FieldBlock(Workspace& ws, ValueShape shape, int npts, BasisRange test, BasisRange trial);
  FieldBlock(FieldBlock&& o) noexcept;
  FieldBlock& operator=(FieldBlock&& o) noexcept;
  FieldBlock(const FieldBlock&) = delete;
  FieldBlock& operator=(const FieldBlock&) = delete;
  ~FieldBlock();

  ValueShape shape() const noexcept { return shape_; }
  int ncomp() const noexcept { return ncomp_; }
  int npts() const noexcept { return npts_; }
  const BasisRange& test() const noexcept { return test_; }
  const BasisRange& trial() const noexcept { return trial_; }
  double* at(int i, int j, int q) noexcept {
    return buf_.data() + ((static_cast<std::size_t>(i) * static_cast<std::size_t>(trial_.count) + static_cast<std::size_t>(j)) *
                              static_cast<std::size_t>(npts_) +
                          static_cast<std::size_t>(q)) *
                             static_cast<std::size_t>(ncomp_);
  }
  const double* at(int i, int j, int q) const noexcept { return const_cast<FieldBlock*>(this)->at(i, j, q); }
  double* data() noexcept { return buf_.data(); }
  const double* data() const noexcept { return buf_.data(); }
  std::size_t size() const noexcept { return buf_.size(); }
  /// Entries per (i, j) pair: npts * ncomp.
  std::size_t stride() const noexcept { return static_cast<std::size_t>(npts_) * static_cast<std::size_t>(ncomp_); }

private:
  Workspace* ws_ = nullptr;
  ValueShape shape_{};
  int ncomp_ = 1;
  int npts_ = 0;
  BasisRange test_, trial_;
  std::vector<double> buf_;
};

/// Reference shape tables at one point set.
struct ShapeTables {
  int ndofs = 0, npts = 0, ncomp = 0, dim = 0;
  std::vector<double> values;  // [dof][q][comp]
  std::vector<double> grads;   // [dof][q][comp][dim]
};

/// Per-thread scratch state: buffer pool plus shape-table cache.
class Workspace {
public:
  std::vector<double> take(std::size_t n);
  void give(std::vector<double>&& v);
  const ShapeTables& tables(const RefElemPtr& elem, const QuadratureRule& rule);

private:
  std::vector<std::vector<double>> pool_;
  std::map<std::pair<const ReferenceElement*, std::size_t>, std::pair<RefElemPtr, ShapeTables>> tables_;
};

/// Positions of each (side, field) dof block in an element vector.
struct ElementLayout {
  int num_sides = 1;
  int num_fields = 0;
  std::vector<int> offsets;  // [side * num_fields + field]
  std::vector<int> counts;
  int total = 0;

  int offset(int side, int field) const { return offsets[static_cast<std::size_t>(side * num_fields + field)]; }
  int count(int side, int field) const { return counts[static_cast<std::size_t>(side * num_fields + field)]; }
};

struct SideInfo {
  int cell = -1;
  int local_facet = -1;
  const QuadratureRule* rule = nullptr;  // points in this side's reference cell
  CellMap map;
};

struct EvalContext {
  const Triangulation* domain = nullptr;
  int item = 0;
  int nsides = 1;
  SideInfo sides[2];
  int side = -1;  // restriction in effect, -1 if none
  int npts = 0;
  const ElementLayout* test = nullptr;
  const ElementLayout* trial = nullptr;
  Workspace* ws = nullptr;

  /// The side cell-based leaves read from; throws DomainError on an
  /// unrestricted skeleton.
  int active_side() const;
};

namespace detail {

enum class NodeKind { Constant, Leaf, Add, Sub, Mul, Inner, Neg, Unary, Binary, Law, Side, Other };

class Node {
public:
  virtual ~Node() = default;
  virtual FieldBlock eval(const EvalContext& ctx) const = 0;
  virtual NodeKind kind() const noexcept { return NodeKind::Other; }
  virtual int num_children() const noexcept { return 0; }
  virtual const Node* child(int) const noexcept { return nullptr; }
  /// The scalar value when this node is a scalar constant.
  virtual std::optional<double> scalar_constant() const noexcept { return std::nullopt; }

  bool test = false;
  bool trial = false;
  std::size_t domain = 0;  // 0 = usable on any domain
};

void check_domain(const Node& n, const EvalContext& ctx);

}  // namespace detail

}  // namespace cartfe
