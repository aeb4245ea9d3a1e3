#include <cstdio>
#include <fstream>
#include <sstream>

#include "cartfe/errors.hpp"
#include "cartfe/postprocess.hpp"

namespace cartfe {

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

// VTK cell type and the permutation from lexicographic corners.
struct CellShape {
  int type;
  std::vector<int> order;
};

CellShape vtk_shape(int item_dim) {
  switch (item_dim) {
    case 0: return {1, {0}};
    case 1: return {3, {0, 1}};
    case 2: return {9, {0, 1, 3, 2}};
    case 3: return {12, {0, 1, 3, 2, 4, 5, 7, 6}};
    default: throw InvalidArgument("VTK output supports items of dimension 0..3");
  }
}

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_vtk(const DomainPtr& domain, const std::string& path, const std::vector<VtkField>& fields) {
  CARTFE_THROW_IF(!domain, InvalidArgument, "null domain");
  const int d = domain->dim();
  CARTFE_THROW_IF(d > 3, InvalidArgument, "VTK output supports dimensions 1..3");
  const bool interior = domain->kind() == DomainKind::Interior;
  const int item_dim = interior ? d : d - 1;
  const CellShape shape = vtk_shape(item_dim);
  const Measure m(domain, vertex_rule(item_dim));
  const int nv = m.rule().size();
  const int nitems = domain->num_items();

  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << "# vtk DataFile Version 3.0\ncartfe output\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nitems * nv << " double\n";
  for (int it = 0; it < nitems; ++it) {
    const CellMap map = domain->cell_map(domain->cell(it));
    const auto& rule = m.cell_rule(interior ? -1 : domain->local_facet(it));
    for (int v = 0; v < nv; ++v) {
      for (int a = 0; a < 3; ++a) {
        if (a) os << ' ';
        put(os, a < d ? map.origin[sz(a)] + map.h[sz(a)] * rule.points[sz(v * d + a)] : 0.0);
      }
      os << '\n';
    }
  }
  os << "CELLS " << nitems << ' ' << nitems * (nv + 1) << '\n';
  for (int it = 0; it < nitems; ++it) {
    os << nv;
    for (int v : shape.order) os << ' ' << it * nv + v;
    os << '\n';
  }
  os << "CELL_TYPES " << nitems << '\n';
  for (int it = 0; it < nitems; ++it) os << shape.type << '\n';

  if (!fields.empty()) os << "POINT_DATA " << nitems * nv << '\n';
  Workspace ws;
  for (const auto& f : fields) {
    CARTFE_THROW_IF(f.field.has_test() || f.field.has_trial(), ArityError, "cannot write basis-dependent fields");
    std::ostringstream body;
    ValueShape vs{};
    for (int it = 0; it < nitems; ++it) {
      const auto ctx = make_context(m, it, ws);
      const FieldBlock b = evaluate(f.field, ctx);
      vs = b.shape();
      for (int v = 0; v < nv; ++v) {
        const double* p = b.at(0, 0, v);
        switch (vs.kind) {
          case ValueKind::Scalar: put(body, p[0]); break;
          case ValueKind::Vector:
            for (int a = 0; a < 3; ++a) {
              if (a) body << ' ';
              put(body, a < vs.dim ? p[a] : 0.0);
            }
            break;
          case ValueKind::Tensor:
            for (int a = 0; a < 3; ++a)
              for (int c = 0; c < 3; ++c) {
                if (a || c) body << ' ';
                put(body, (a < vs.dim && c < vs.dim) ? p[a * vs.dim + c] : 0.0);
              }
            break;
        }
        body << '\n';
      }
    }
    CARTFE_THROW_IF(vs.dim > 3, KindError, "VTK output supports values of dimension <= 3");
    switch (vs.kind) {
      case ValueKind::Scalar: os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n"; break;
      case ValueKind::Vector: os << "VECTORS " << f.name << " double\n"; break;
      case ValueKind::Tensor: os << "TENSORS " << f.name << " double\n"; break;
    }
    os << body.str();
  }
  if (!os) throw IoError("error while writing '" + path + "'");
}

VtkData read_vtk(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  VtkData out;
  std::string tok;
  int npoints = 0;
  auto number = [&](const std::string& what) {
    std::string s;
    if (!(is >> s)) throw ParseError(path + ": unexpected end of file reading " + what);
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw ParseError(path + ": bad number '" + s + "' in " + what);
    }
  };
  while (is >> tok) {
    if (tok == "POINTS") {
      std::string type;
      is >> npoints >> type;
      out.points.resize(sz(3 * npoints));
      for (auto& v : out.points) v = number("POINTS");
    } else if (tok == "CELLS") {
      int n = 0, total = 0;
      is >> n >> total;
      out.cells.resize(sz(n));
      for (auto& c : out.cells) {
        const int k = static_cast<int>(number("CELLS"));
        c.resize(sz(k));
        for (auto& v : c) v = static_cast<int>(number("CELLS"));
      }
    } else if (tok == "CELL_TYPES") {
      int n = 0;
      is >> n;
      out.cell_types.resize(sz(n));
      for (auto& t : out.cell_types) t = static_cast<int>(number("CELL_TYPES"));
    } else if (tok == "SCALARS" || tok == "VECTORS" || tok == "TENSORS") {
      std::string name, type;
      is >> name >> type;
      int nc = tok == "SCALARS" ? 1 : tok == "VECTORS" ? 3 : 9;
      if (tok == "SCALARS") {
        std::string lt, def;
        is >> nc >> lt >> def;
      }
      auto& arr = out.arrays[name];
      arr.resize(sz(npoints * nc));
      for (auto& v : arr) v = number(name);
      out.components[name] = nc;
    }
  }
  return out;
}

}  // namespace cartfe
