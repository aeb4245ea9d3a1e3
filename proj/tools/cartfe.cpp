// Command-line front end: one subcommand per tutorial driver.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cartfe/drivers.hpp"
#include "cartfe/errors.hpp"
#include "cartfe/simd/kernels.hpp"

using namespace cartfe;

namespace {

void common_flags(CLI::App* app, DriverConfig& c, std::string& ordering) {
  app->add_option("--n", c.n, "cells per axis");
  app->add_option("--order", c.order, "polynomial order");
  app->add_option("--degree", c.degree, "quadrature degree override");
  app->add_option("--tol", c.tol, "tolerance for built-in checks or Newton");
  app->add_option("--max-iters", c.max_iters, "Newton iteration cap");
  app->add_option("--seed", c.seed, "random initial guess seed");
  app->add_option("--out", c.out, "output prefix for PREFIX.vtk and PREFIX.summary");
  app->add_option("--mesh", c.mesh, "native mesh file replacing the Cartesian box")->check(CLI::ExistingFile);
  app->add_option("--threads", c.threads, "assembly threads")->check(CLI::PositiveNumber);
  app->add_flag("--check-jacobian", c.check_jacobian, "compare the Jacobian with finite differences");
  app->add_flag("--trace", c.trace, "print the Newton trace");
  app->add_option("--ordering", ordering, "LU fill-reducing ordering")->check(CLI::IsMember({"rcm", "natural"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite elements on Cartesian meshes"};
  app.require_subcommand(1);
  DriverConfig cfg;
  std::string ordering = "rcm";
  std::string isa;
  app.add_option("--isa", isa, "force the kernel variant")->check(CLI::IsMember({"scalar", "avx2"}));

  const std::map<std::string, std::pair<std::string, std::function<Summary(const DriverConfig&)>>> drivers = {
      {"poisson", {"Poisson with Dirichlet and Neumann data", run_poisson}},
      {"elasticity", {"linear elasticity of a clamped bar", run_elasticity}},
      {"plaplacian", {"nonlinear p-Laplacian by Newton", run_plaplacian}},
      {"dg", {"symmetric interior penalty DG", run_dg}},
      {"darcy", {"mixed Darcy with Raviart-Thomas flux", run_darcy}},
      {"cavity", {"lid-driven cavity Navier-Stokes", run_cavity}},
      {"convergence", {"manufactured-solution convergence study", run_convergence}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, d] : drivers) {
    CLI::App* sub = app.add_subcommand(name, d.first);
    common_flags(sub, cfg, ordering);
    subs[name] = sub;
  }
  for (const char* name : {"poisson", "dg"}) subs[name]->add_option("--dim", cfg.dim, "space dimension")->check(CLI::Range(2, 3));
  subs["poisson"]->add_option("--f", cfg.f, "source");
  subs["poisson"]->add_option("--g", cfg.g, "Dirichlet value");
  subs["poisson"]->add_option("--neumann", cfg.h, "Neumann flux h");
  subs["poisson"]->add_flag("--full-dirichlet", cfg.full_dirichlet, "Dirichlet data on the whole boundary");
  subs["elasticity"]->add_option("--young", cfg.young, "Young's modulus");
  subs["elasticity"]->add_option("--poisson-ratio", cfg.poisson_ratio, "Poisson's ratio");
  subs["elasticity"]->add_option("--delta", cfg.delta, "axial displacement of the loaded end");
  subs["elasticity"]->add_flag("--patch-test", cfg.patch_test, "affine Dirichlet data on the whole boundary");
  subs["plaplacian"]->add_option("--p", cfg.p, "exponent (>= 2)");
  subs["plaplacian"]->add_option("--f", cfg.f, "source");
  subs["plaplacian"]->add_option("--g", cfg.g, "Dirichlet value on x1 = 1");
  subs["plaplacian"]->add_option("--dim", cfg.dim, "space dimension")->check(CLI::Range(2, 3));
  subs["plaplacian"]->add_flag("--zero-guess", cfg.zero_guess, "start Newton from zero");
  subs["darcy"]->add_flag("--homogeneous", cfg.homogeneous, "identity permeability everywhere");
  subs["darcy"]->add_flag("--paper-scale", cfg.paper_scale, "100 x 100 mesh");
  subs["cavity"]->add_option("--re", cfg.reynolds, "Reynolds number (0 gives Stokes)");
  subs["convergence"]->add_option("--ns", cfg.ns, "cells per axis for each run")->delimiter(',');
  subs["convergence"]->add_option("--solution", cfg.solution, "manufactured solution")
      ->check(CLI::IsMember({"sin", "linear"}));

  CLI11_PARSE(app, argc, argv);
  cfg.ordering = ordering == "natural" ? Ordering::Natural : Ordering::ReverseCuthillMcKee;
  try {
    if (!isa.empty()) simd::force_isa(isa == "avx2" ? simd::Isa::Avx2 : simd::Isa::Scalar);
    for (const auto& [name, d] : drivers) {
      if (!subs[name]->parsed()) continue;
      const Summary s = d.second(cfg);
      std::cout << s.str();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "cartfe: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cartfe: unexpected failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
