#pragma once

// Helpers shared by the driver implementations.

#include <cstdio>
#include <string>

#include "cartfe/drivers.hpp"
#include "cartfe/errors.hpp"

namespace cartfe::drivers {

inline int pick(int v, int def) { return v >= 0 ? v : def; }
inline int pick_positive(int v, int def) { return v > 0 ? v : def; }
inline double pick(double v, double def) { return v >= 0.0 ? v : def; }

/// Unit box [0,1]^dim with n cells per axis, or the model in cfg.mesh.
ModelPtr load_or_box(const DriverConfig& cfg, int dim, int n);

/// Labeling with `name` bound to the closures of the given box sides.
FaceLabeling with_sides(const FaceLabeling& labels, int dim, const std::string& name,
                        std::initializer_list<std::pair<int, int>> axis_side);

LinearSolver linear_solver(const DriverConfig& cfg);

/// Linear solve plus the residual contract check; records solver stats.
std::vector<double> solve_checked(const AffineOperator& op, const DriverConfig& cfg, Summary& s);

/// Write PREFIX.summary if an output prefix is set.
void finish(const DriverConfig& cfg, const Summary& s);

inline std::string path(const DriverConfig& cfg, const std::string& suffix) { return cfg.out + suffix; }

/// Scientific notation for check messages.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw AssertionFailure("check failed: " + what);
}

std::string format_log(const std::vector<NewtonStep>& log);

}  // namespace cartfe::drivers
