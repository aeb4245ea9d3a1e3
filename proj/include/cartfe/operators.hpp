#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cartfe/cellfield.hpp"
#include "cartfe/fespace.hpp"
#include "cartfe/sparse.hpp"

namespace cartfe {

/// a(u, v): trial basis fields, test basis fields.
using BilinearFn = std::function<CellField(const Fields& u, const Fields& v)>;
/// b(v)
using LinearFn = std::function<CellField(const Fields& v)>;
/// res(uh, v)
using ResidualFn = std::function<CellField(const Fields& uh, const Fields& v)>;
/// jac(uh, du, v)
using JacobianFn = std::function<CellField(const Fields& uh, const Fields& du, const Fields& v)>;

enum class TermKind { Affine, Linear, Source, Nonlinear };

/// One weak-form contribution integrated over a single measure.
struct Term {
  TermKind kind;
  Measure measure;
  BilinearFn a;
  LinearFn b;
  ResidualFn res;
  JacobianFn jac;
};

/// Matrix and right-hand side.
Term affine_term(BilinearFn a, LinearFn b, Measure m);
/// Matrix only.
Term linear_term(BilinearFn a, Measure m);
/// Right-hand side only.
Term source_term(LinearFn b, Measure m);
Term nonlinear_term(ResidualFn res, JacobianFn jac, Measure m);

struct AssemblyOptions {
  /// Worker threads over contiguous item chunks; 1 keeps results bitwise reproducible.
  int threads = 1;
};

/// Linear problem A x = b over free dofs, Dirichlet values eliminated.
class AffineOperator {
public:
  AffineOperator(MultiFieldSpace trial, MultiFieldSpace test, CsrMatrix a, std::vector<double> b)
      : trial_(std::move(trial)), test_(std::move(test)), a_(std::move(a)), b_(std::move(b)) {}
  const MultiFieldSpace& trial() const noexcept { return trial_; }
  const MultiFieldSpace& test() const noexcept { return test_; }
  const CsrMatrix& matrix() const noexcept { return a_; }
  const std::vector<double>& rhs() const noexcept { return b_; }
  /// Fields with free values x and the trial Dirichlet values.
  MultiFieldFEFunction fields(std::span<const double> x) const { return unpack(trial_, x); }

private:
  MultiFieldSpace trial_, test_;
  CsrMatrix a_;
  std::vector<double> b_;
};

AffineOperator assemble_affine(const MultiFieldSpace& trial, const MultiFieldSpace& test,
                               const std::vector<Term>& terms, AssemblyOptions options = {});

/// Matrix of a bilinear integrand over all dofs (constrained ones too) with
/// the raw numbering: free dofs first, then constrained dofs per field.
/// Used to cross-check Dirichlet elimination.
CsrMatrix assemble_raw_matrix(const MultiFieldSpace& trial, const MultiFieldSpace& test, const BilinearFn& a,
                              const Measure& m);

/// General nonlinear problem r(x) = 0 over the free dofs.
class NonlinearOperator {
public:
  NonlinearOperator(MultiFieldSpace trial, MultiFieldSpace test, std::vector<Term> terms, AssemblyOptions options = {});
  const MultiFieldSpace& trial() const noexcept { return trial_; }
  const MultiFieldSpace& test() const noexcept { return test_; }
  int size() const noexcept { return test_.num_free(); }

  std::vector<double> residual(std::span<const double> x) const;
  CsrMatrix jacobian(std::span<const double> x) const;
  MultiFieldFEFunction fields(std::span<const double> x) const { return unpack(trial_, x); }

private:
  MultiFieldSpace trial_, test_;
  std::vector<Term> terms_;
  AssemblyOptions options_;
};

/// Interior-penalty parameter for polynomial order k: k(k+1).
inline double ip_penalty(int order) { return order * (order + 1.0); }

}  // namespace cartfe
