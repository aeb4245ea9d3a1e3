// Native mesh format. One record per line, '#' starts a comment:
//
//   cartfe-mesh 1
//   dim <d>
//   box <x0> <x1> [<y0> <y1> ...]          hexadecimal floating point
//   partition <n1> [<n2> ...]
//   vertices <count>
//   <x> [<y> ...]                            one line per vertex
//   faces <m> <count>                        for m = 0 .. d
//   <face> <entity>                          one line per face
//   tags <count>
//   <name>: <entity> <entity> ...
//   end

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cartfe/errors.hpp"
#include "cartfe/mesh.hpp"

namespace cartfe {

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

class LineReader {
public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Next non-empty, non-comment line split into whitespace tokens.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::istringstream ss(line);
      std::vector<std::string> toks;
      for (std::string t; ss >> t;) toks.push_back(t);
      if (!toks.empty()) return toks;
    }
    fail(std::string("unexpected end of file, expected ") + what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(lineno_) + ": " + msg);
  }

  void expect_keyword(const std::vector<std::string>& toks, const char* kw, std::size_t ntok) {
    if (toks[0] != kw) fail(std::string("expected '") + kw + "', found '" + toks[0] + "'");
    if (ntok != 0 && toks.size() != ntok) {
      fail(std::string("'") + kw + "' record needs " + std::to_string(ntok - 1) + " field(s), found " +
           std::to_string(toks.size() - 1));
    }
  }

  int to_int(const std::string& s, const char* field) const {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(std::string("field ") + field + ": bad integer '" + s + "'");
    return v;
  }

  double to_double(const std::string& s, const char* field) const {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail(std::string("field ") + field + ": bad number '" + s + "'");
    return v;
  }

private:
  std::istringstream in_;
  int lineno_ = 0;
};

}  // namespace

std::string format_model(const DiscreteModel& model) {
  std::ostringstream os;
  const int d = model.dim();
  os << "cartfe-mesh 1\n";
  os << "dim " << d << "\n";
  os << "box";
  for (double b : model.box()) os << ' ' << hex(b);
  os << "\npartition";
  for (int n : model.partition()) os << ' ' << n;
  os << "\nvertices " << model.num_vertices() << "\n";
  for (int v = 0; v < model.num_vertices(); ++v) {
    const auto x = model.vertex(v);
    for (int a = 0; a < d; ++a) os << (a ? " " : "") << hex(x[static_cast<std::size_t>(a)]);
    os << "\n";
  }
  const auto& labels = model.labeling();
  for (int m = 0; m <= d; ++m) {
    os << "faces " << m << ' ' << model.num_faces(m) << "\n";
    const auto ent = labels.face_entities(m);
    for (std::size_t f = 0; f < ent.size(); ++f) os << f << ' ' << ent[f] << "\n";
  }
  os << "tags " << labels.tags().size() << "\n";
  for (const auto& [name, ids] : labels.tags()) {
    os << name << ':';
    for (int id : ids) os << ' ' << id;
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

void write_model(const DiscreteModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << format_model(model);
  if (!out) throw IoError("write to '" + path + "' failed");
}

ModelPtr parse_model(const std::string& text) {
  LineReader r(text);
  auto t = r.next("header");
  if (t.size() != 2 || t[0] != "cartfe-mesh" || t[1] != "1") r.fail("expected header 'cartfe-mesh 1'");

  t = r.next("dim");
  r.expect_keyword(t, "dim", 2);
  const int d = r.to_int(t[1], "dim");
  if (d < 1 || d > kMaxDim) r.fail("dim must be in 1..4");

  t = r.next("box");
  r.expect_keyword(t, "box", static_cast<std::size_t>(2 * d + 1));
  std::vector<double> box;
  for (int i = 0; i < 2 * d; ++i) box.push_back(r.to_double(t[static_cast<std::size_t>(i + 1)], "box"));

  t = r.next("partition");
  r.expect_keyword(t, "partition", static_cast<std::size_t>(d + 1));
  std::vector<int> part;
  for (int i = 0; i < d; ++i) part.push_back(r.to_int(t[static_cast<std::size_t>(i + 1)], "partition"));

  ModelPtr base;
  try {
    base = cartesian_model(box, part);
  } catch (const InvalidArgument& e) {
    r.fail(std::string("invalid geometry: ") + e.what());
  }

  t = r.next("vertices");
  r.expect_keyword(t, "vertices", 2);
  const int nv = r.to_int(t[1], "vertices");
  if (nv != base->num_vertices()) {
    r.fail("vertex count " + std::to_string(nv) + " does not match the partition (" +
           std::to_string(base->num_vertices()) + ")");
  }
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(nv * d));
  for (int v = 0; v < nv; ++v) {
    t = r.next("vertex coordinates");
    if (static_cast<int>(t.size()) != d) r.fail("vertex " + std::to_string(v) + " needs " + std::to_string(d) + " coordinates");
    for (const auto& s : t) coords.push_back(r.to_double(s, "vertex coordinate"));
  }

  const int nent = base->labeling().num_entities();
  std::vector<std::vector<int>> ent(static_cast<std::size_t>(d + 1));
  for (int m = 0; m <= d; ++m) {
    t = r.next("faces");
    r.expect_keyword(t, "faces", 3);
    if (r.to_int(t[1], "faces dimension") != m) r.fail("expected faces block of dimension " + std::to_string(m));
    const int nf = r.to_int(t[2], "faces count");
    if (nf != base->num_faces(m)) {
      r.fail("dimension-" + std::to_string(m) + " face count " + std::to_string(nf) + " does not match the partition (" +
             std::to_string(base->num_faces(m)) + ")");
    }
    auto& e = ent[static_cast<std::size_t>(m)];
    e.assign(static_cast<std::size_t>(nf), 0);
    for (int i = 0; i < nf; ++i) {
      t = r.next("face record");
      if (t.size() != 2) r.fail("face record needs '<face> <entity>'");
      const int f = r.to_int(t[0], "face");
      const int id = r.to_int(t[1], "entity");
      if (f < 0 || f >= nf) r.fail("face index " + std::to_string(f) + " out of range");
      if (id < 1 || id > nent) r.fail("entity id " + std::to_string(id) + " out of range 1.." + std::to_string(nent));
      auto& slot = e[static_cast<std::size_t>(f)];
      if (slot != 0) {
        r.fail("dimension-" + std::to_string(m) + " face " + std::to_string(f) + " assigned two entity ids (" +
               std::to_string(slot) + " and " + std::to_string(id) + ")");
      }
      slot = id;
    }
  }
  FaceLabeling labels(std::move(ent), nent);

  t = r.next("tags");
  r.expect_keyword(t, "tags", 2);
  const int ntags = r.to_int(t[1], "tags count");
  for (int i = 0; i < ntags; ++i) {
    t = r.next("tag record");
    const std::string& head = t[0];
    if (head.size() < 2 || head.back() != ':') r.fail("tag record must start with '<name>:'");
    const std::string name = head.substr(0, head.size() - 1);
    if (labels.has_tag(name)) r.fail("tag \"" + name + "\" defined twice");
    std::vector<int> ids;
    for (std::size_t k = 1; k < t.size(); ++k) {
      const int id = r.to_int(t[k], "tag entity");
      if (id < 1 || id > nent) {
        r.fail("tag \"" + name + "\" references entity " + std::to_string(id) + ", which does not exist");
      }
      ids.push_back(id);
    }
    labels.set_tag(name, std::move(ids));
  }
  t = r.next("end");
  r.expect_keyword(t, "end", 1);

  return build_model_with_coords(box, part, std::move(coords), std::move(labels));
}

ModelPtr read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace cartfe
