#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "minorant/error.hpp"
#include "minorant/ext_real.hpp"
#include "minorant/io.hpp"

namespace minorant::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return ExtReal::parse(v.get<std::string>()).value();
    } catch (const Error&) {
    }
  }
  fail(where + ": expected a number or an infinity token");
}

json number_out(double v) {
  if (std::isfinite(v)) return v;
  return ExtReal(v).to_string();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + ": expected an integer");
  return v.get<int>();
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

json numbers_out(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_out(x));
  return a;
}

FieldSource field(const json& v, const std::string& where) {
  FieldSource f;
  if (v.is_string())
    f.expr = v.get<std::string>();
  else
    f.values = numbers(v, where);
  return f;
}

json field_out(const FieldSource& f) {
  if (!f.expr.empty()) return f.expr;
  return numbers_out(f.values);
}

std::array<int, 4> rect(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) fail(where + ": expected [ix0, iy0, ix1, iy1]");
  return {integer(v[0], where), integer(v[1], where), integer(v[2], where), integer(v[3], where)};
}

std::vector<NodeWeight> node_weights(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of [ix, iy, w]");
  std::vector<NodeWeight> out;
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 3) fail(where + ": expected [ix, iy, w]");
    out.push_back({integer(e[0], where), integer(e[1], where), number(e[2], where)});
  }
  return out;
}

json node_weights_out(const std::vector<NodeWeight>& ws) {
  json a = json::array();
  for (const auto& w : ws) a.push_back(json::array({w.ix, w.iy, number_out(w.w)}));
  return a;
}

std::vector<DivisorInput> divisor(const json& v) {
  if (!v.is_array()) fail("divisor: expected an array of [x, y, m]");
  std::vector<DivisorInput> out;
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 3) fail("divisor: expected [x, y, m]");
    out.push_back({number(e[0], "divisor"), number(e[1], "divisor"), integer(e[2], "divisor")});
  }
  return out;
}

json divisor_out(const std::vector<DivisorInput>& z) {
  json a = json::array();
  for (const auto& e : z) a.push_back(json::array({e.x, e.y, e.m}));
  return a;
}

std::vector<std::vector<double>> matrix(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + ": expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : v) out.push_back(numbers(row, where));
  return out;
}

json matrix_out(const std::vector<std::vector<double>>& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(numbers_out(row));
  return a;
}

const std::set<std::string> kCommands = {"envelope", "projlattice", "supremal", "dual",
                                         "balayage", "pipeline",    "criterion", "transform"};
const std::set<std::string> kGridCommands = {"supremal", "dual", "balayage", "pipeline", "criterion", "transform"};

bool in_grid(const GridSpec& g, int ix, int iy) { return ix >= 0 && iy >= 0 && ix < g.nx && iy < g.ny; }

void check_references(const ProblemSpec& s) {
  if (!kCommands.count(s.command)) fail("unknown command '" + s.command + "'");
  if (!kGridCommands.count(s.command)) return;
  const GridSpec& g = s.grid;
  if (g.nx < 3 || g.ny < 3) fail("grid: nx and ny must be at least 3");
  if (!(g.spacing > 0.0) || !std::isfinite(g.spacing)) fail("grid: spacing must be positive");
  if (!g.mask_rle.empty()) {
    std::size_t total = 0;
    for (std::size_t r : g.mask_rle) total += r;
    if (total != static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny))
      fail("grid: mask runs must cover nx*ny nodes");
  }
  const std::size_t n = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
  for (const FieldSource* f : {&s.F, &s.M, &s.params.radius})
    if (!f->values.empty() && f->values.size() != n) fail("field: expected nx*ny values");
  for (const auto& w : s.nu)
    if (!in_grid(g, w.ix, w.iy)) fail("nu: node outside the grid");
  for (const auto& row : s.cone.rows)
    for (const auto& t : row.terms)
      if (!in_grid(g, t.ix, t.iy)) fail("cone: row term outside the grid");
  auto rect_ok = [&](const std::array<int, 4>& r) {
    return in_grid(g, r[0], r[1]) && in_grid(g, r[2], r[3]) && r[0] < r[2] && r[1] < r[3];
  };
  if (s.params.u0 && !rect_ok(*s.params.u0)) fail("U0: rectangle outside the grid");
  if (s.params.u1 && !rect_ok(*s.params.u1)) fail("U1: rectangle outside the grid");
  if (s.params.u0 && s.params.u1) {
    const auto& a = *s.params.u0;
    const auto& b = *s.params.u1;
    if (!(a[0] >= b[0] && a[1] >= b[1] && a[2] <= b[2] && a[3] <= b[3])) fail("U0 must be nested in U1");
  }
  if (s.params.z0 && !in_grid(g, (*s.params.z0)[0], (*s.params.z0)[1])) fail("z0: node outside the grid");
}

}  // namespace

GridDomain GridSpec::build() const {
  if (mask_rle.empty()) return GridDomain::rectangle(nx, ny, spacing, origin_x, origin_y);
  std::vector<std::uint8_t> mask;
  std::uint8_t v = 0;
  for (std::size_t r : mask_rle) {
    mask.insert(mask.end(), r, v);
    v = static_cast<std::uint8_t>(1 - v);
  }
  return GridDomain::from_mask(nx, ny, spacing, mask, origin_x, origin_y);
}

GridFunction FieldSource::build(const GridDomain& d, std::uint64_t seed) const {
  GridFunction f(d, 0.0);
  if (!values.empty()) {
    if (values.size() != d.size()) throw Error(ErrorCode::ParseError, "field: expected nx*ny values");
    for (std::size_t p : d.inside_nodes()) f[p] = values[p];
    return f;
  }
  if (expr.empty() || expr == "zero") return f;
  auto arg = [&](std::size_t from) {
    try {
      std::size_t used = 0;
      const double v = std::stod(expr.substr(from), &used);
      return std::pair{v, from + used};
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "field: bad expression '" + expr + "'");
    }
  };
  if (expr.rfind("const:", 0) == 0) {
    const double c = arg(6).first;
    for (std::size_t p : d.inside_nodes()) f[p] = c;
  } else if (expr == "radial2") {
    for (std::size_t p : d.inside_nodes()) f[p] = d.x(p) * d.x(p) + d.y(p) * d.y(p);
  } else if (expr == "saddle") {
    for (std::size_t p : d.inside_nodes()) f[p] = d.x(p) * d.x(p) - d.y(p) * d.y(p);
  } else if (expr.rfind("random:", 0) == 0) {
    const auto [lo, next] = arg(7);
    if (next >= expr.size() || expr[next] != ':') throw Error(ErrorCode::ParseError, "field: expected random:<lo>:<hi>");
    const double hi = arg(next + 1).first;
    if (!(lo < hi)) throw Error(ErrorCode::ParseError, "field: random needs lo < hi");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (std::size_t p : d.inside_nodes()) f[p] = u(rng);
  } else {
    throw Error(ErrorCode::ParseError, "field: unknown expression '" + expr + "'");
  }
  return f;
}

ProblemSpec parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("problem must be a JSON object");
  ProblemSpec s;
  try {
    if (const json* c = find(j, "command"); c && c->is_string())
      s.command = c->get<std::string>();
    else
      fail("command: expected a string");
    if (const json* v = find(j, "seed")) {
      if (!v->is_number_unsigned()) fail("seed: expected a nonnegative integer");
      s.seed = v->get<std::uint64_t>();
    }
    if (const json* g = find(j, "grid")) {
      if (!g->is_object()) fail("grid: expected an object");
      s.grid.nx = integer(g->value("nx", json()), "grid.nx");
      s.grid.ny = integer(g->value("ny", json()), "grid.ny");
      if (const json* v = find(*g, "spacing")) s.grid.spacing = number(*v, "grid.spacing");
      if (const json* v = find(*g, "origin")) {
        const auto o = numbers(*v, "grid.origin");
        if (o.size() != 2) fail("grid.origin: expected [x, y]");
        s.grid.origin_x = o[0];
        s.grid.origin_y = o[1];
      }
      if (const json* v = find(*g, "mask_rle")) {
        if (!v->is_array()) fail("grid.mask_rle: expected an array");
        for (const auto& r : *v) {
          if (!r.is_number_unsigned()) fail("grid.mask_rle: expected nonnegative integers");
          s.grid.mask_rle.push_back(r.get<std::size_t>());
        }
      }
    }
    if (const json* v = find(j, "F")) s.F = field(*v, "F");
    if (const json* v = find(j, "M")) s.M = field(*v, "M");
    if (const json* v = find(j, "nu")) s.nu = node_weights(*v, "nu");
    if (const json* v = find(j, "divisor")) s.divisor = divisor(*v);
    if (const json* v = find(j, "divisor2")) s.divisor2 = divisor(*v);
    if (const json* c = find(j, "cone")) {
      if (c->is_string()) {
        s.cone.kind = c->get<std::string>();
      } else if (c->is_object()) {
        if (const json* k = find(*c, "kind"); k && k->is_string()) s.cone.kind = k->get<std::string>();
        if (const json* b = find(*c, "b")) s.cone.b = number(*b, "cone.b");
        if (const json* rows = find(*c, "rows")) {
          if (!rows->is_array()) fail("cone.rows: expected an array");
          for (const auto& r : *rows) {
            CustomRow row;
            if (const json* t = find(r, "terms")) row.terms = node_weights(*t, "cone.rows.terms");
            if (const json* rel = find(r, "relation")) {
              const std::string x = rel->is_string() ? rel->get<std::string>() : "";
              if (x != ">=" && x != "=") fail("cone.rows.relation: expected \">=\" or \"=\"");
              row.equality = x == "=";
            }
            if (const json* o = find(r, "offset")) row.offset = number(*o, "cone.rows.offset");
            s.cone.rows.push_back(std::move(row));
          }
        }
      } else {
        fail("cone: expected a kind string or an object");
      }
      static const std::set<std::string> kinds = {"subharmonic", "harmonic", "truncated", "custom"};
      if (!kinds.count(s.cone.kind)) fail("cone: unknown kind '" + s.cone.kind + "'");
    }
    if (const json* p = find(j, "params")) {
      if (!p->is_object()) fail("params: expected an object");
      if (const json* v = find(*p, "tol")) s.params.tol = number(*v, "params.tol");
      if (const json* v = find(*p, "U0")) s.params.u0 = rect(*v, "params.U0");
      if (const json* v = find(*p, "U1")) s.params.u1 = rect(*v, "params.U1");
      if (const json* v = find(*p, "radius")) {
        if (v->is_number()) {
          std::ostringstream os;
          os.precision(17);
          os << "const:" << v->get<double>();
          s.params.radius.expr = os.str();
        } else {
          s.params.radius = field(*v, "params.radius");
        }
      }
      if (const json* v = find(*p, "mode"); v && v->is_string()) s.params.mode = v->get<std::string>();
      if (const json* v = find(*p, "uq"); v && v->is_string()) s.params.uq = v->get<std::string>();
      if (const json* v = find(*p, "a")) s.params.a = number(*v, "params.a");
      if (const json* v = find(*p, "depth")) s.params.depth = integer(*v, "params.depth");
      if (const json* v = find(*p, "z0")) {
        if (!v->is_array() || v->size() != 2) fail("params.z0: expected [ix, iy]");
        s.params.z0 = std::array<int, 2>{integer((*v)[0], "params.z0"), integer((*v)[1], "params.z0")};
      }
      if (const json* v = find(*p, "level")) s.params.level = static_cast<std::size_t>(integer(*v, "params.level"));
    }
    if (const json* v = find(j, "samples")) {
      if (const json* d = find(*v, "dim")) s.samples.dim = static_cast<std::size_t>(integer(*d, "samples.dim"));
      if (const json* pts = find(*v, "points")) s.samples.points = matrix(*pts, "samples.points");
      if (const json* vals = find(*v, "values")) s.samples.values = numbers(*vals, "samples.values");
    }
    if (const json* v = find(j, "lattice")) {
      if (const json* d = find(*v, "depth")) s.lattice.depth = static_cast<std::size_t>(integer(*d, "lattice.depth"));
      if (const json* h = find(*v, "H")) s.lattice.H = matrix(*h, "lattice.H");
      if (const json* q = find(*v, "q1_weight")) s.lattice.q1_weight = number(*q, "lattice.q1_weight");
    }
    if (const json* v = find(j, "queries")) s.queries = matrix(*v, "queries");
  } catch (const json::exception& e) {
    fail(std::string("bad problem: ") + e.what());
  }
  check_references(s);
  return s;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string serialize_problem(const ProblemSpec& s) {
  json j;
  j["command"] = s.command;
  j["seed"] = s.seed;
  json g;
  g["nx"] = s.grid.nx;
  g["ny"] = s.grid.ny;
  g["spacing"] = s.grid.spacing;
  g["origin"] = json::array({s.grid.origin_x, s.grid.origin_y});
  if (!s.grid.mask_rle.empty()) g["mask_rle"] = s.grid.mask_rle;
  j["grid"] = g;
  if (!s.F.empty()) j["F"] = field_out(s.F);
  if (!s.M.empty()) j["M"] = field_out(s.M);
  if (!s.nu.empty()) j["nu"] = node_weights_out(s.nu);
  if (!s.divisor.empty()) j["divisor"] = divisor_out(s.divisor);
  if (!s.divisor2.empty()) j["divisor2"] = divisor_out(s.divisor2);
  json c;
  c["kind"] = s.cone.kind;
  if (s.cone.b != 0.0) c["b"] = s.cone.b;
  if (!s.cone.rows.empty()) {
    json rows = json::array();
    for (const auto& r : s.cone.rows) {
      json row;
      row["terms"] = node_weights_out(r.terms);
      row["relation"] = r.equality ? "=" : ">=";
      row["offset"] = r.offset;
      rows.push_back(row);
    }
    c["rows"] = rows;
  }
  j["cone"] = c;
  json p;
  p["tol"] = s.params.tol;
  if (s.params.u0) p["U0"] = *s.params.u0;
  if (s.params.u1) p["U1"] = *s.params.u1;
  if (!s.params.radius.empty()) p["radius"] = field_out(s.params.radius);
  if (!s.params.mode.empty()) p["mode"] = s.params.mode;
  if (!s.params.uq.empty()) p["uq"] = s.params.uq;
  p["a"] = s.params.a;
  p["depth"] = s.params.depth;
  if (s.params.z0) p["z0"] = *s.params.z0;
  p["level"] = s.params.level;
  j["params"] = p;
  if (s.samples.dim != 0 || !s.samples.points.empty()) {
    json sm;
    sm["dim"] = s.samples.dim;
    sm["points"] = matrix_out(s.samples.points);
    sm["values"] = numbers_out(s.samples.values);
    j["samples"] = sm;
  }
  if (s.lattice.depth != 0 || !s.lattice.H.empty()) {
    json l;
    l["depth"] = s.lattice.depth;
    l["H"] = matrix_out(s.lattice.H);
    l["q1_weight"] = s.lattice.q1_weight;
    j["lattice"] = l;
  }
  if (!s.queries.empty()) j["queries"] = matrix_out(s.queries);
  return j.dump(2) + "\n";
}

}  // namespace minorant::io
