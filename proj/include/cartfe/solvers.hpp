#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cartfe/operators.hpp"
#include "cartfe/sparse.hpp"

namespace cartfe {

enum class Ordering { Natural, ReverseCuthillMcKee };

/// Symmetric reverse Cuthill-McKee permutation of the pattern of A + A^T:
/// perm[new] = old.
std::vector<int> rcm_ordering(const CsrMatrix& a);

/// Left-looking sparse LU with threshold partial pivoting (diagonal kept when
/// within `pivot_threshold` of the column maximum).
class SparseLU {
public:
  explicit SparseLU(const CsrMatrix& a, Ordering ordering = Ordering::ReverseCuthillMcKee,
                    double pivot_threshold = 0.1);
  int size() const noexcept { return n_; }
  std::size_t factor_nnz() const noexcept { return lx_.size() + ux_.size(); }
  std::vector<double> solve(std::span<const double> b) const;

private:
  int n_ = 0;
  std::vector<int> perm_;  // perm_[new] = old
  std::vector<int> pinv_;  // pivot position of each permuted row
  std::vector<int> lp_, li_, up_, ui_;
  std::vector<double> lx_, ux_;
};

struct CgOptions {
  double rtol = 1e-12;
  int max_iters = 10000;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // final ||r||_2 / ||b||_2
};

/// Jacobi-preconditioned conjugate gradients. Refuses matrices that are not
/// symmetric (1e-10 relative) or have a non-positive diagonal.
CgResult conjugate_gradient(const CsrMatrix& a, std::span<const double> b, CgOptions options = {});

struct LinearSolver {
  enum class Kind { LU, CG } kind = Kind::LU;
  Ordering ordering = Ordering::ReverseCuthillMcKee;
  CgOptions cg;

  static LinearSolver lu(Ordering o = Ordering::ReverseCuthillMcKee) { return {Kind::LU, o, {}}; }
  static LinearSolver conjugate_gradient(CgOptions o = {}) { return {Kind::CG, Ordering::Natural, o}; }
};

std::vector<double> solve_linear(const CsrMatrix& a, std::span<const double> b, const LinearSolver& solver = {});

struct NewtonOptions {
  LinearSolver linear;
  double tol = 1e-8;  // on ||r||_inf
  int max_iters = 20;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 25;
  bool trace = false;
  std::ostream* trace_stream = nullptr;  // defaults to std::cout
};

/// One line of the iteration log; alpha is the step that produced this
/// residual (0 for the initial guess).
struct NewtonStep {
  int iter = 0;
  double res_inf = 0.0;
  double res_2 = 0.0;
  double alpha = 0.0;
};

struct NewtonResult {
  std::vector<double> x;
  std::vector<NewtonStep> log;
  int iterations = 0;  // Newton updates applied
};

/// Throws IterationLimitError, LineSearchError or SingularSystemError; the
/// message of the first two carries the last residual.
NewtonResult solve_newton(const NonlinearOperator& op, std::vector<double> x0, const NewtonOptions& options = {});

/// Uniform [0, 1) entries from a seeded mt19937 (default seed 1234).
std::vector<double> random_vector(int n, std::uint32_t seed = 1234);

}  // namespace cartfe
