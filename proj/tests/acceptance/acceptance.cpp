// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cartfe/drivers.hpp"
#include "cartfe/errors.hpp"
#include "cartfe/quadrature.hpp"
#include "cartfe/reffe.hpp"
#include "oracles.hpp"

using namespace cartfe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome dg() {
  DriverConfig c;
  c.n = 4;
  c.order = 3;
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = run_dg(c);
  const double t = seconds_since(t0);
  const double el2 = s.number("el2"), eh1 = s.number("eh1"), jmp = s.number("jump_max");
  return {el2 < 1e-10 && eh1 < 1e-10 && jmp < 1e-10 && t < 10.0,
          "el2=" + fmt("%.3e", el2) + " eh1=" + fmt("%.3e", eh1) + " jump_max=" + fmt("%.3e", jmp) +
              " time=" + fmt("%.2f", t) + "s"};
}

Outcome convergence() {
  DriverConfig c;
  c.order = 2;
  c.ns = {8, 16, 32, 64};
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = run_convergence(c);
  const double t = seconds_since(t0);
  const double l2 = s.number("slope_l2"), h1 = s.number("slope_h1");
  return {l2 >= 2.8 && l2 <= 3.2 && h1 >= 1.8 && h1 <= 2.2 && t < 30.0,
          "slope_l2=" + fmt("%.4f", l2) + " slope_h1=" + fmt("%.4f", h1) + " time=" + fmt("%.2f", t) + "s"};
}

Outcome exact_linear() {
  double worst = 0.0;
  for (int n : {1, 2, 5, 16, 33})
    for (int k : {1, 2, 3}) {
      const auto e = manufactured_poisson(n, k, "linear");
      worst = std::max({worst, e.el2, e.eh1});
    }
  return {worst < 1e-10, "max(el2, eh1) over n in {1,2,5,16,33}, order 1..3 = " + fmt("%.3e", worst)};
}

Outcome darcy() {
  DriverConfig c;
  c.homogeneous = true;
  c.order = 1;
  const auto s1 = run_darcy(c);
  c.order = 0;
  const auto s0 = run_darcy(c);
  const auto het = run_darcy(DriverConfig{});
  // Literal L2 pressure error of the lowest-order pair, reported for the record.
  const double h = 1.0 / 32.0;
  const double u1 = s1.number("u_el2"), p1 = s1.number("p_el2");
  const double u0 = s0.number("u_el2"), p0 = s0.number("p_cell_mean_error");
  const double flux = het.number("flux_bc_max");
  return {u1 < 1e-10 && p1 < 1e-10 && u0 < 1e-10 && p0 < 1e-10 && flux == 0.0,
          "RT1/Q1: u_el2=" + fmt("%.3e", u1) + " p_el2=" + fmt("%.3e", p1) + "; RT0/Q0: u_el2=" + fmt("%.3e", u0) +
              " p equals cell mean of x1 to " + fmt("%.3e", p0) + " (L2 distance to x1 is h/sqrt(12)=" +
              fmt("%.3e", h / std::sqrt(12.0)) + "); heterogeneous flux_bc_max=" + fmt("%.1e", flux)};
}

Outcome elasticity() {
  DriverConfig c;
  c.patch_test = true;
  const auto patch = run_elasticity(c);
  const auto full = run_elasticity(DriverConfig{});
  const double pe = patch.number("patch_error_l2"), sa = full.number("sigma_asymmetry_l2");
  return {pe < 1e-10 && sa < 1e-10 && full.number("max_free_displacement") > 0.0,
          "patch_error_l2=" + fmt("%.3e", pe) + " sigma_asymmetry_l2=" + fmt("%.3e", sa) +
              " max_free_displacement=" + fmt("%.6g", full.number("max_free_displacement"))};
}

Outcome plaplacian() {
  DriverConfig c2;
  c2.p = 2.0;
  const auto s2 = run_plaplacian(c2);
  const auto s3 = run_plaplacian(DriverConfig{});
  DriverConfig cj;
  cj.n = 4;
  cj.check_jacobian = true;
  const auto sj = run_plaplacian(cj);
  const int it2 = static_cast<int>(s2.number("newton_iterations"));
  const double r3 = s3.number("residual_inf"), fd = sj.number("jacobian_fd_error");
  return {it2 <= 2 && r3 < 1e-8 && fd < 1e-5,
          "p=2 iterations=" + std::to_string(it2) + "; p=3 |r|_inf=" + fmt("%.3e", r3) + " in " +
              s3.get("newton_iterations") + " iterations; jacobian_fd_error=" + fmt("%.3e", fd)};
}

Outcome cavity() {
  DriverConfig c;
  c.n = 32;
  c.order = 2;
  c.reynolds = 10.0;
  const auto s = run_cavity(c);
  const double pint = s.number("pressure_integral"), lid = s.number("lid_error");
  return {s.number("residual_inf") < 1e-8 && std::abs(pint) < 1e-12 * 1.0 && lid == 0.0,
          "iterations=" + s.get("newton_iterations") + " |r|_inf=" + fmt("%.3e", s.number("residual_inf")) +
              " int_ph=" + fmt("%.3e", pint) + " lid_dofs=" + s.get("lid_dofs") + " lid_error=" + fmt("%.1e", lid) +
              " degree=" + s.get("degree") + " div_l2=" + fmt("%.4f", s.number("div_l2"))};
}

// Condensed versions of the unit-test property checks.
Outcome unit_properties() {
  double quad = 0.0;
  for (int d = 1; d <= 3; ++d)
    for (int deg = 0; deg <= 8; ++deg) {
      const auto r = gauss_rule(d, deg);
      std::vector<int> e(static_cast<std::size_t>(d), deg);
      double q = 0.0;
      for (int k = 0; k < r.size(); ++k) {
        double v = r.weights[static_cast<std::size_t>(k)];
        for (int a = 0; a < d; ++a) v *= std::pow(r.point(k)[static_cast<std::size_t>(a)], deg);
        q += v;
      }
      quad = std::max(quad, std::abs(q - oracle::monomial_integral(e)));
    }

  double pou = 0.0;
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u01(0, 1);
  for (int d = 1; d <= 3; ++d)
    for (int k = 1; k <= 4; ++k) {
      const auto e = q_lagrangian(d, k);
      std::vector<double> x(static_cast<std::size_t>(d));
      for (auto& xi : x) xi = u01(rng);
      const auto v = e->shape_values(x);
      double s = 0.0;
      for (double vi : v) s += vi;
      pou = std::max(pou, std::abs(s - 1.0));
    }

  // Continuity through the assembled jump: int jump(uh)^2 over the skeleton
  // for H1 fields and int jump(uh . n)^2 for HDiv fields.
  double cont = 0.0;
  const auto m = cartesian_model({0, 1, 0, 1}, {3, 3});
  const auto skel = skeleton_triangulation(m);
  const Measure ds(skel, 6);
  const CellField n = get_normal_vector(skel);
  for (int k : {1, 2, 3}) {
    const auto v = test_space(m, Family::QLagrangian, k, ValueShape::vector(2), Conformity::H1);
    const auto f = fe_field(fe_function(*trial_space(v), random_vector(v->num_free(), 3)));
    cont = std::max(cont, std::sqrt(integrate_sum(inner(jump(f), jump(f)), ds)));
  }
  for (int k : {0, 1, 2}) {
    const auto v = test_space(m, Family::RaviartThomas, k, ValueShape::vector(2), Conformity::HDiv);
    const auto f = fe_field(fe_function(*trial_space(v), random_vector(v->num_free(), 4)));
    const CellField jn = jump(f * n);
    cont = std::max(cont, std::sqrt(integrate_sum(jn * jn, ds)));
  }

  double lu = 0.0;
  for (std::size_t sz : {7u, 50u, 200u}) {
    const auto a = oracle::random_sparse(sz, 0.05, 0.5, rng);
    std::vector<double> b(sz);
    for (auto& x : b) x = u01(rng);
    const auto x = SparseLU(CsrMatrix::from_dense(static_cast<int>(sz), static_cast<int>(sz), a)).solve(b);
    const auto ref = oracle::dense_solve(a, b);
    lu = std::max(lu, oracle::max_abs_diff(x, ref) / oracle::max_abs(ref));
  }

  const auto el = run_elasticity(DriverConfig{});
  double sym = el.number("matrix_asymmetry");
  {
    SpaceOptions o;
    o.dirichlet_tags = {"boundary"};
    const auto m3 = cartesian_model({0, 1, 0, 1, 0, 1}, {3, 3, 3});
    const auto v = test_space(m3, Family::QLagrangian, 2, ValueShape::scalar(), Conformity::H1, o);
    const auto op = assemble_affine(trial_space(v), v,
                                    {linear_term([](const Fields& uu, const Fields& vv) { return inner(grad(vv), grad(uu)); },
                                                 Measure(triangulation(m3), 4))});
    sym = std::max(sym, op.matrix().asymmetry() / norm_inf(op.matrix().val));
  }

  const bool ok = quad < 1e-13 && pou < 1e-13 && cont < 1e-12 && lu < 1e-8 && sym < 1e-12;
  return {ok, "quadrature=" + fmt("%.1e", quad) + " partition_of_unity=" + fmt("%.1e", pou) +
                  " continuity=" + fmt("%.1e", cont) + " lu_vs_dense=" + fmt("%.1e", lu) +
                  " asymmetry=" + fmt("%.1e", sym)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"DG manufactured solution", dg},
      {"convergence rates", convergence},
      {"exact linear representation", exact_linear},
      {"Darcy homogeneous oracle", darcy},
      {"elasticity patch test", elasticity},
      {"p-Laplacian Newton", plaplacian},
      {"cavity properties", cavity},
      {"unit properties", unit_properties},
  };
  int failures = 0, id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %d (%s): %s | %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
