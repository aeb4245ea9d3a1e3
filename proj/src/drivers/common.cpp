#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cartfe {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Summary::add(const std::string& key, double v) { entries_.emplace_back(key, fmt(v)); }
void Summary::add(const std::string& key, int v) { entries_.emplace_back(key, std::to_string(v)); }
void Summary::add(const std::string& key, const std::string& v) { entries_.emplace_back(key, v); }

const std::string& Summary::get(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  throw InvalidArgument("summary has no key '" + key + "'");
}

bool Summary::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

std::string Summary::str() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << '=' << v << '\n';
  return os.str();
}

void Summary::write(const std::string& p) const {
  std::ofstream os(p);
  if (!os) throw IoError("cannot open '" + p + "' for writing");
  os << str();
}

std::pair<double, double> lame_parameters(double young, double nu) {
  CARTFE_THROW_IF(!(young > 0.0) || !(nu > -1.0 && nu < 0.5), InvalidArgument, "invalid elastic constants");
  return {(young * nu) / ((1 + nu) * (1 - 2 * nu)), young / (2 * (1 + nu))};
}

double jacobian_fd_error(const NonlinearOperator& op, std::span<const double> x, double eps) {
  const int n = op.size();
  const std::vector<double> r0 = op.residual(x);
  const CsrMatrix j = op.jacobian(x);
  const std::vector<double> dense = j.to_dense();
  double jmax = 0.0;
  for (double v : dense) jmax = std::max(jmax, std::abs(v));
  std::vector<double> xp(x.begin(), x.end());
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    const auto cs = static_cast<std::size_t>(c);
    const double step = eps * std::max(1.0, std::abs(x[cs]));
    xp[cs] = x[cs] + step;
    const std::vector<double> r1 = op.residual(xp);
    xp[cs] = x[cs];
    double diff = 0.0, col = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto is = static_cast<std::size_t>(i);
      const double a = dense[is * static_cast<std::size_t>(n) + cs];
      diff = std::max(diff, std::abs((r1[is] - r0[is]) / step - a));
      col = std::max(col, std::abs(a));
    }
    worst = std::max(worst, diff / std::max(col, 1e-8 * jmax));
  }
  return worst;
}

namespace drivers {

ModelPtr load_or_box(const DriverConfig& cfg, int dim, int n) {
  if (!cfg.mesh.empty()) return read_model(cfg.mesh);
  CARTFE_THROW_IF(n < 1, InvalidArgument, "--n must be positive");
  std::vector<double> box;
  for (int a = 0; a < dim; ++a) {
    box.push_back(0.0);
    box.push_back(1.0);
  }
  return cartesian_model(box, std::vector<int>(static_cast<std::size_t>(dim), n));
}

FaceLabeling with_sides(const FaceLabeling& labels, int dim, const std::string& name,
                        std::initializer_list<std::pair<int, int>> axis_side) {
  std::vector<TagRef> ids;
  for (const auto& [axis, side] : axis_side)
    for (int e : entity_closure(dim, box_side_entity(dim, axis, side))) ids.emplace_back(e);
  return add_tag_from_tags(labels, name, ids);
}

LinearSolver linear_solver(const DriverConfig& cfg) { return LinearSolver::lu(cfg.ordering); }

std::vector<double> solve_checked(const AffineOperator& op, const DriverConfig& cfg, Summary& s) {
  const auto x = solve_linear(op.matrix(), op.rhs(), linear_solver(cfg));
  const auto ax = op.matrix() * x;
  double res = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) res = std::max(res, std::abs(ax[i] - op.rhs()[i]));
  const double rel = res / (1.0 + norm_inf(op.rhs()));
  s.add("num_free_dofs", op.matrix().nrows);
  s.add("matrix_nnz", op.matrix().nnz());
  s.add("linear_residual", rel);
  require(rel <= 1e-10, "linear residual " + sci(rel) + " above 1e-10");
  return x;
}

void finish(const DriverConfig& cfg, const Summary& s) {
  if (!cfg.out.empty()) s.write(path(cfg, ".summary"));
}

std::string format_log(const std::vector<NewtonStep>& log) {
  std::ostringstream os;
  for (const auto& st : log) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", st.iter, st.res_inf, st.res_2, st.alpha);
    os << buf;
  }
  return os.str();
}

}  // namespace drivers
}  // namespace cartfe
