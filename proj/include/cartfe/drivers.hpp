#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cartfe/operators.hpp"
#include "cartfe/postprocess.hpp"
#include "cartfe/solvers.hpp"

namespace cartfe {

/// Settings shared by the tutorial drivers. A negative value means "use the
/// driver's default" (each driver documents its own).
struct DriverConfig {
  int n = -1;
  int order = -1;
  int degree = -1;
  double tol = -1.0;
  int max_iters = -1;
  std::uint32_t seed = 1234;
  std::string out;   // output prefix; empty writes nothing
  std::string mesh;  // optional native mesh file replacing the Cartesian box
  int threads = 1;
  bool check_jacobian = false;
  bool trace = false;
  Ordering ordering = Ordering::ReverseCuthillMcKee;

  int dim = -1;  // poisson, dg
  // poisson
  double f = 1.0, g = 2.0, h = 3.0;
  bool full_dirichlet = false;
  // elasticity
  double young = 70.0e9, poisson_ratio = 0.33, delta = 0.005;
  bool patch_test = false;
  // plaplacian
  double p = 3.0;
  bool zero_guess = false;
  // darcy
  bool homogeneous = false;
  bool paper_scale = false;
  // cavity
  double reynolds = 10.0;
  // convergence
  std::vector<int> ns;
  std::string solution = "sin";  // sin | linear
};

/// Ordered key=value pairs written one per line.
class Summary {
public:
  void add(const std::string& key, double v);
  void add(const std::string& key, int v);
  void add(const std::string& key, const std::string& v);
  void add_bool(const std::string& key, bool v) { add(key, std::string(v ? "true" : "false")); }
  /// Value for key, or throws InvalidArgument.
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const { return std::stod(get(key)); }
  bool has(const std::string& key) const;
  std::string str() const;
  void write(const std::string& path) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Each driver returns its summary, writes PREFIX.vtk (and related files)
/// plus PREFIX.summary when cfg.out is set, and throws AssertionFailure when
/// a built-in check fails.
Summary run_poisson(const DriverConfig& cfg);
Summary run_elasticity(const DriverConfig& cfg);
Summary run_plaplacian(const DriverConfig& cfg);
Summary run_dg(const DriverConfig& cfg);
Summary run_darcy(const DriverConfig& cfg);
Summary run_cavity(const DriverConfig& cfg);
Summary run_convergence(const DriverConfig& cfg);

/// One manufactured Poisson solve on the unit square with "boundary" Dirichlet
/// data; solution "sin" is sin(2 pi x1) x2, "linear" is x1 + x2.
ErrorNorms manufactured_poisson(int n, int order, const std::string& solution, int degree = -1,
                                const LinearSolver& solver = {});

ConvergenceRecord convergence_study(const std::vector<int>& ns, int order, const std::string& solution = "sin");

/// Maximum relative column difference between the analytic Jacobian and a
/// forward-difference approximation (step eps) at x.
double jacobian_fd_error(const NonlinearOperator& op, std::span<const double> x, double eps = 1e-7);

/// Lame parameters from Young's modulus and Poisson's ratio.
std::pair<double, double> lame_parameters(double young, double nu);

}  // namespace cartfe
