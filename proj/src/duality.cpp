#include "minorant/duality.hpp"

#include <cmath>
#include <sstream>

#include "minorant/error.hpp"
#include "minorant/kernels.hpp"

namespace minorant {

namespace {

ConeSpec stencil_cone(const GridDomain& d, ConeKind kind, ConeRelation rel, double offset) {
  ConeSpec c;
  c.kind = kind;
  for (std::size_t p : d.interior_nodes()) {
    ConeRow row;
    row.relation = rel;
    row.offset = offset;
    row.terms.emplace_back(p, -1.0);
    for (std::size_t n : d.neighbors(p)) row.terms.emplace_back(n, 0.25);
    c.rows.push_back(std::move(row));
  }
  return c;
}

// Column index of every inside node in the programs below.
std::vector<std::size_t> node_columns(const GridDomain& d) {
  std::vector<std::size_t> col(d.size(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < d.inside_nodes().size(); ++k) col[d.inside_nodes()[k]] = k;
  return col;
}

void check_inputs(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu, const GridFunction& f) {
  cone.validate(d);
  check_measure(d, nu);
  check_shape(d, f);
  if (!(nu.mass() > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be a nonzero measure");
}

lp::Relation to_lp(ConeRelation r) { return r == ConeRelation::Equal ? lp::Relation::Equal : lp::Relation::GreaterEqual; }

// Program over h on the inside nodes restricted to H; upper bounds from F.
lp::LinearProgram cone_program(const GridDomain& d, const ConeSpec& cone, const std::vector<std::size_t>& col,
                               const GridFunction* upper, double lower, double box) {
  lp::LinearProgram prog(lp::Sense::Maximize);
  for (std::size_t p : d.inside_nodes()) {
    double ub = box;
    if (upper != nullptr) ub = std::min(ub, (*upper)[p]);
    prog.add_variable(lower, ub, 0.0);
  }
  for (const auto& row : cone.rows) {
    std::vector<lp::Term> terms;
    for (const auto& [node, coef] : row.terms) terms.push_back({col[node], coef});
    prog.add_row(std::move(terms), to_lp(row.relation), row.offset);
  }
  return prog;
}

lp::SolveOptions lp_options(const DualityOptions& opt, double shift = 0.0) {
  lp::SolveOptions o;
  o.tol = opt.tol;
  if (opt.observer) {
    o.observer = [obs = opt.observer, shift](const lp::IterationInfo& info) {
      lp::IterationInfo shifted = info;
      shifted.objective += shift;
      obs(shifted);
    };
  }
  return o;
}

// Per-node list of (row, coefficient): the columns of A^T.
std::vector<std::vector<std::pair<std::size_t, double>>> transpose(const GridDomain& d, const ConeSpec& cone) {
  std::vector<std::vector<std::pair<std::size_t, double>>> at(d.size());
  for (std::size_t k = 0; k < cone.rows.size(); ++k)
    for (const auto& [node, coef] : cone.rows[k].terms) at[node].emplace_back(k, coef);
  return at;
}

}  // namespace

ConeSpec ConeSpec::subharmonic(const GridDomain& d) {
  return stencil_cone(d, ConeKind::Subharmonic, ConeRelation::GreaterEqual, 0.0);
}

ConeSpec ConeSpec::harmonic(const GridDomain& d) { return stencil_cone(d, ConeKind::Harmonic, ConeRelation::Equal, 0.0); }

ConeSpec ConeSpec::truncated_subharmonic(const GridDomain& d, double b) {
  if (!(b <= 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation offset must be <= 0");
  return stencil_cone(d, ConeKind::Subharmonic, ConeRelation::GreaterEqual, b);
}

bool ConeSpec::is_cone() const {
  for (const auto& r : rows)
    if (r.offset != 0.0) return false;
  return true;
}

void ConeSpec::validate(const GridDomain& d) const {
  for (const auto& r : rows) {
    if (!std::isfinite(r.offset) || r.offset > 0.0) throw Error(ErrorCode::InvalidArgument, "cone offsets must be finite and <= 0");
    if (r.relation == ConeRelation::Equal && r.offset != 0.0)
      throw Error(ErrorCode::InvalidArgument, "equality rows must have zero offset");
    for (const auto& [node, coef] : r.terms) {
      if (node >= d.size() || !d.is_inside(node)) throw Error(ErrorCode::InvalidArgument, "cone row references a non-inside node");
      if (!std::isfinite(coef)) throw Error(ErrorCode::InvalidArgument, "cone coefficient is not finite");
    }
  }
}

std::vector<double> ConeSpec::residual(const GridFunction& h) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    double s = -r.offset;
    for (const auto& [node, coef] : r.terms) s += coef * h[node];
    out.push_back(s);
  }
  return out;
}

PrimalResult supremal_value(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu, const GridFunction& f,
                            const DualityOptions& opt) {
  check_inputs(d, cone, nu, f);
  PrimalResult res;
  for (std::size_t p : d.inside_nodes())
    if (f[p] == -std::numeric_limits<double>::infinity()) {
      res.value = ExtReal::minus_infinity();
      return res;
    }
  const auto col = node_columns(d);
  lp::LinearProgram prog = cone_program(d, cone, col, &f, -lp::kInfinity, lp::kInfinity);
  for (std::size_t p : d.inside_nodes()) prog.set_cost(col[p], nu[p]);
  const lp::Outcome out = lp::solve(prog, lp_options(opt));
  res.iterations = out.iterations;
  if (out.status == lp::Status::Infeasible) {
    res.value = ExtReal::minus_infinity();
    return res;
  }
  if (out.status == lp::Status::Unbounded) {
    res.value = ExtReal::plus_infinity();
    return res;
  }
  res.value = out.objective;
  std::vector<double> best = out.primal;

  if (opt.canonical_argmax) {
    lp::LinearProgram second = cone_program(d, cone, col, &f, -lp::kInfinity, lp::kInfinity);
    std::vector<lp::Term> level;
    for (std::size_t p : d.inside_nodes()) {
      second.set_cost(col[p], 1.0);
      if (nu[p] != 0.0) level.push_back({col[p], nu[p]});
    }
    second.add_row(std::move(level), lp::Relation::GreaterEqual, out.objective - opt.tol * (1.0 + std::abs(out.objective)));
    lp::SolveOptions o2;
    o2.tol = opt.tol;
    const lp::Outcome top = lp::solve(second, o2);
    res.iterations += top.iterations;
    if (top.status == lp::Status::Optimal) best = top.primal;
  }
  GridFunction h(d);
  for (std::size_t p : d.inside_nodes()) h[p] = best[col[p]];
  res.argmax = std::move(h);
  return res;
}

DualResult sweep_dual_value(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu, const GridFunction& f,
                            const DualityOptions& opt) {
  if (!cone.is_cone()) throw Error(ErrorCode::InvalidArgument, "sweep dual needs a cone (zero offsets)");
  return affine_sweep_dual(d, cone, nu, f, opt);
}

DualResult affine_sweep_dual(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu, const GridFunction& f,
                             const DualityOptions& opt) {
  check_inputs(d, cone, nu, f);
  const auto at = transpose(d, cone);
  const double inf = std::numeric_limits<double>::infinity();

  auto base_program = [&](lp::Sense sense, bool pin_minus_inf) {
    lp::LinearProgram prog(sense);
    for (const auto& r : cone.rows)
      prog.add_variable(r.relation == ConeRelation::Equal ? -lp::kInfinity : 0.0, lp::kInfinity, 0.0);
    for (std::size_t p : d.inside_nodes()) {
      std::vector<lp::Term> terms;
      for (const auto& [k, coef] : at[p]) terms.push_back({k, coef});
      if (terms.empty() && nu[p] == 0.0) continue;
      const bool pinned = f[p] == inf || (pin_minus_inf && f[p] == -inf);
      prog.add_row(std::move(terms), pinned ? lp::Relation::Equal : lp::Relation::GreaterEqual, -nu[p]);
    }
    return prog;
  };

  DualResult res;
  bool has_minus_inf = false;
  for (std::size_t p : d.inside_nodes()) has_minus_inf = has_minus_inf || f[p] == -inf;
  if (has_minus_inf) {
    // Can a certificate charge a node where F = -inf?
    lp::LinearProgram reach = base_program(lp::Sense::Maximize, false);
    for (std::size_t k = 0; k < cone.rows.size(); ++k) {
      double c = 0.0;
      for (const auto& [node, coef] : cone.rows[k].terms)
        if (f[node] == -inf) c += coef;
      reach.set_cost(k, c);
    }
    double base = 0.0;
    for (std::size_t p : d.inside_nodes())
      if (f[p] == -inf) base += nu[p];
    lp::SolveOptions o;
    o.tol = opt.tol;
    const lp::Outcome r = lp::solve(reach, o);
    res.iterations += r.iterations;
    if (r.status == lp::Status::Infeasible) {
      res.value = ExtReal::plus_infinity();
      return res;
    }
    if (r.status == lp::Status::Unbounded || base + r.objective > opt.tol) {
      res.value = ExtReal::minus_infinity();
      return res;
    }
  }

  lp::LinearProgram prog = base_program(lp::Sense::Minimize, true);
  double constant = 0.0;
  for (std::size_t p : d.inside_nodes())
    if (std::isfinite(f[p])) constant += f[p] * nu[p];
  for (std::size_t k = 0; k < cone.rows.size(); ++k) {
    double c = -cone.rows[k].offset;
    for (const auto& [node, coef] : cone.rows[k].terms)
      if (std::isfinite(f[node])) c += coef * f[node];
    prog.set_cost(k, c);
  }
  const lp::Outcome out = lp::solve(prog, lp_options(opt, constant));
  res.iterations += out.iterations;
  if (out.status == lp::Status::Infeasible) {
    res.value = ExtReal::plus_infinity();
    return res;
  }
  if (out.status == lp::Status::Unbounded) {
    res.value = ExtReal::minus_infinity();
    return res;
  }
  SweepCertificate cert{out.primal, DiscreteMeasure(d), 0.0};
  for (std::size_t p : d.inside_nodes()) {
    double m = nu[p];
    for (const auto& [k, coef] : at[p]) m += coef * cert.lambda[k];
    // Rounding residue of an exact zero; genuine negatives fail verification.
    if (m < 0.0 && m > -opt.tol) m = 0.0;
    cert.mu[p] = m;
  }
  for (std::size_t k = 0; k < cone.rows.size(); ++k) cert.c -= cone.rows[k].offset * cert.lambda[k];
  res.value = out.objective + constant;
  res.certificate = std::move(cert);
  return res;
}

bool jensen_verify(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu, const DiscreteMeasure& mu,
                   double c, double tol) {
  cone.validate(d);
  check_measure(d, nu);
  check_measure(d, mu);
  if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "affine constant must be finite");
  const auto col = node_columns(d);
  const bool cone_mode = cone.is_cone();
  const double box = cone_mode ? 1.0 : lp::kInfinity;
  lp::LinearProgram prog = cone_program(d, cone, col, nullptr, -box, box);
  prog.set_sense(lp::Sense::Minimize);
  for (std::size_t p : d.inside_nodes()) prog.set_cost(col[p], mu[p] - nu[p]);
  lp::SolveOptions o;
  o.tol = std::min(tol, 1e-9);
  const lp::Outcome out = lp::solve(prog, o);
  if (out.status != lp::Status::Optimal) return false;
  return out.objective + c >= -tol * (1.0 + nu.mass() + mu.mass());
}

ExistenceResult minorant_exists(const GridDomain& d, const ConeSpec& cone, const GridFunction& f) {
  cone.validate(d);
  check_shape(d, f);
  ExistenceResult res;
  for (std::size_t p : d.inside_nodes())
    if (f[p] == -std::numeric_limits<double>::infinity()) {
      FarkasSummary fs;
      fs.infinite_node = p;
      std::ostringstream os;
      os << "F = -inf at node (" << d.ix(p) << "," << d.iy(p) << ")";
      fs.text = os.str();
      res.farkas = std::move(fs);
      return res;
    }
  const auto col = node_columns(d);
  const lp::LinearProgram prog = cone_program(d, cone, col, &f, -lp::kInfinity, lp::kInfinity);
  const lp::Outcome out = lp::solve(prog);
  if (out.status == lp::Status::Infeasible) {
    FarkasSummary fs;
    fs.row_weights = out.farkas;
    std::ostringstream os;
    os << "rows combined:";
    for (std::size_t k = 0; k < fs.row_weights.size(); ++k)
      if (fs.row_weights[k] != 0.0) os << ' ' << k << ':' << fs.row_weights[k];
    fs.text = os.str();
    res.farkas = std::move(fs);
    return res;
  }
  res.exists = true;
  GridFunction h(d);
  for (std::size_t p : d.inside_nodes()) h[p] = out.primal[col[p]];
  res.h = std::move(h);
  return res;
}

PositivityCheck dual_positivity_check(const GridDomain& d, const ConeSpec& cone, const DiscreteMeasure& nu,
                                      const GridFunction& f) {
  check_inputs(d, cone, nu, f);
  PositivityCheck res;
  for (std::size_t p : d.inside_nodes())
    if (!std::isfinite(f[p])) return res;
  lp::LinearProgram prog(lp::Sense::Minimize);
  for (const auto& r : cone.rows) {
    double c = -r.offset;
    for (const auto& [node, coef] : r.terms) c += coef * f[node];
    prog.add_variable(r.relation == ConeRelation::Equal ? -lp::kInfinity : 0.0, lp::kInfinity, c);
  }
  const lp::Outcome out = lp::solve(prog);
  if (out.status != lp::Status::Optimal) return res;
  res.applicable = true;
  const auto at = transpose(d, cone);
  res.min_mu = std::numeric_limits<double>::infinity();
  for (std::size_t p : d.inside_nodes()) {
    double m = nu[p];
    for (const auto& [k, coef] : at[p]) m += coef * out.primal[k];
    res.min_mu = std::min(res.min_mu, m);
  }
  return res;
}

GridFunction obstacle_minorant(const GridDomain& d, const GridFunction& f, double tol, bool parallel) {
  check_shape(d, f);
  for (std::size_t p : d.inside_nodes())
    if (!std::isfinite(f[p])) throw Error(ErrorCode::InfiniteValue, "obstacle iteration needs a finite obstacle");
  std::vector<std::uint8_t> mask(d.size(), 0);
  for (std::size_t p : d.interior_nodes()) mask[p] = 1;
  const auto view = d.view(mask);
  GridFunction h = f;
  for (;;) {
    const double change = parallel ? kernels::parallel::obstacle_sweep(view, h.values, f.values)
                                   : kernels::serial::obstacle_sweep(view, h.values, f.values);
    if (change <= tol) break;
  }
  return h;
}

}  // namespace minorant
