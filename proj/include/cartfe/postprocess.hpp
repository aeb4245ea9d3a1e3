#pragma once

#include <map>
#include <string>
#include <vector>

#include "cartfe/cellfield.hpp"

namespace cartfe {

struct ErrorNorms {
  double el2 = 0.0;
  double eh1 = 0.0;
};

/// el2 = sqrt(int e.e), eh1 = sqrt(int e.e + grad e : grad e). Needs gradient(e).
ErrorNorms error_norms(const CellField& e, const Measure& m);
double l2_norm(const CellField& e, const Measure& m);

struct ConvergenceSample {
  double h = 0.0;
  double el2 = 0.0;
  double eh1 = 0.0;
};

struct ConvergenceRecord {
  int order = 1;
  std::vector<ConvergenceSample> samples;  // h strictly decreasing
};

/// Least-squares slope of log10(y) against log10(x); needs >= 3 samples.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Slopes {
  double l2 = 0.0;
  double h1 = 0.0;
};
Slopes convergence_slopes(const ConvergenceRecord& record);

struct VtkField {
  std::string name;
  CellField field;
};

/// Legacy ASCII VTK unstructured grid. Every item (cell or facet) gets its own
/// copies of its vertices, so discontinuous fields are written faithfully.
void write_vtk(const DomainPtr& domain, const std::string& path, const std::vector<VtkField>& fields);

/// Minimal reader for files produced by write_vtk.
struct VtkData {
  std::vector<double> points;  // 3 per point
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> arrays;
  std::map<std::string, int> components;
};
VtkData read_vtk(const std::string& path);

}  // namespace cartfe
