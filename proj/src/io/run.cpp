#include <cmath>
#include <filesystem>
#include <iostream>

#include "json.hpp"
#include "minorant/duality.hpp"
#include "minorant/envelope.hpp"
#include "minorant/error.hpp"
#include "minorant/holo.hpp"
#include "minorant/io.hpp"
#include "minorant/potential.hpp"
#include "minorant/projlattice.hpp"
#include "minorant/smoothing.hpp"

namespace minorant::io {

using json = nlohmann::ordered_json;

namespace {

json ext(double v) {
  if (std::isfinite(v)) return v;
  return ExtReal(v).to_string();
}
json ext(const ExtReal& v) { return ext(v.value()); }

double gap_of(double p, double d) { return p == d ? 0.0 : std::abs(p - d); }

json sparse(const GridDomain& d, const DiscreteMeasure& mu) {
  json a = json::array();
  for (std::size_t p : d.inside_nodes())
    if (mu[p] != 0.0) a.push_back(json::array({d.ix(p), d.iy(p), mu[p]}));
  return a;
}

struct Context {
  const ProblemSpec& spec;
  const RunOptions& opt;
  std::uint64_t seed;
  double tol;
  GridDomain d;
  json report;
  json fields = json::object();
  RunOutput out;

  void emit(const std::string& name, const GridFunction& f) {
    const std::string csv = field_csv(d, f);
    fields[name] = csv;
    if (opt.format == Format::Csv || opt.format == Format::All) out.files[name + ".csv"] = csv;
    if (opt.format == Format::Pgm || opt.format == Format::All) out.files[name + ".pgm"] = field_pgm(d, f);
  }

  GridFunction field(const FieldSource& src, const char* what) const {
    if (src.empty()) throw Error(ErrorCode::ParseError, std::string(what) + " is required");
    return src.build(d, seed);
  }

  std::size_t node(int ix, int iy) const { return d.index(ix, iy); }

  DiscreteMeasure nu() const {
    DiscreteMeasure m(d);
    for (const auto& w : spec.nu) m[node(w.ix, w.iy)] += w.w;
    if (spec.nu.empty() && spec.params.z0) m[node((*spec.params.z0)[0], (*spec.params.z0)[1])] = 1.0;
    return m;
  }

  ConeSpec cone() const {
    const auto& c = spec.cone;
    if (c.kind == "subharmonic") return ConeSpec::subharmonic(d);
    if (c.kind == "harmonic") return ConeSpec::harmonic(d);
    if (c.kind == "truncated") return ConeSpec::truncated_subharmonic(d, c.b);
    ConeSpec out;
    for (const auto& r : c.rows) {
      ConeRow row;
      for (const auto& t : r.terms) row.terms.emplace_back(node(t.ix, t.iy), t.w);
      row.relation = r.equality ? ConeRelation::Equal : ConeRelation::GreaterEqual;
      row.offset = r.offset;
      out.rows.push_back(std::move(row));
    }
    out.validate(d);
    return out;
  }

  SubDomain rect(const std::optional<std::array<int, 4>>& r, const char* what) const {
    if (!r) throw Error(ErrorCode::ParseError, std::string(what) + " is required");
    return SubDomain::from_rect(d, (*r)[0], (*r)[1], (*r)[2], (*r)[3]);
  }

  DualityOptions duality() const {
    DualityOptions o;
    o.tol = tol;
    return o;
  }

  Divisor divisor(const std::vector<DivisorInput>& in) const {
    Divisor z;
    for (const auto& a : in) z.atoms.push_back({a.x, a.y, a.m});
    return z;
  }

  void certificate(const std::optional<SweepCertificate>& cert) {
    if (!cert) {
      report["certificate"] = nullptr;
      return;
    }
    json c;
    c["c"] = cert->c;
    c["mu"] = sparse(d, cert->mu);
    c["lambda"] = cert->lambda;
    report["certificate"] = c;
  }

  void farkas(const std::optional<FarkasSummary>& fk) {
    if (!fk) return;
    json f;
    if (fk->infinite_node)
      f["infinite_node"] = json::array({d.ix(*fk->infinite_node), d.iy(*fk->infinite_node)});
    else
      f["infinite_node"] = nullptr;
    json rows = json::array();
    for (std::size_t k = 0; k < fk->row_weights.size(); ++k)
      if (fk->row_weights[k] != 0.0) rows.push_back(json::array({k, fk->row_weights[k]}));
    f["row_weights"] = rows;
    f["text"] = fk->text;
    report["farkas"] = f;
  }

  void criterion(const CriterionReport& rep) {
    report["status"] = rep.feasible ? "feasible" : "infeasible";
    report["primal"] = ext(rep.primal_value);
    report["dual"] = ext(rep.dual_value);
    report["gap"] = ext(gap_of(rep.primal_value.value(), rep.dual_value.value()));
    report["C"] = rep.C ? json(*rep.C) : json(nullptr);
    report["integral_constant"] = rep.integral_constant ? json(*rep.integral_constant) : json(nullptr);
    if (rep.ifbal_discrepancy) report["ifbal_discrepancy"] = *rep.ifbal_discrepancy;
    certificate(rep.certificate);
    farkas(rep.farkas);
    if (!rep.notes.empty()) report["notes"] = rep.notes;
    if (rep.h) emit("h", *rep.h);
    out.exit_code = rep.feasible ? 0 : 2;
    out.summary = spec.command + ": " + (rep.feasible ? "feasible" : "infeasible") +
                  " primal=" + rep.primal_value.to_string() + " dual=" + rep.dual_value.to_string();
  }
};

void run_envelope(Context& cx) {
  SampledFunction f{cx.spec.samples.dim, cx.spec.samples.points, cx.spec.samples.values};
  f.validate();
  const std::string mode = cx.spec.params.mode.empty() ? "conic" : cx.spec.params.mode;
  if (mode != "conic" && mode != "convex") throw Error(ErrorCode::ParseError, "envelope mode must be conic or convex");
  const bool conic = mode == "conic";
  json rows = json::array();
  double worst = 0.0;
  for (const auto& x : cx.spec.queries) {
    const ExtReal a = minorant_formula(f, x, conic ? MinorantMode::Conic : MinorantMode::Convex);
    const ExtReal b = lower_envelope(f, x, conic ? EnvelopeFamily::Linear : EnvelopeFamily::Affine);
    const double diff = gap_of(a.value(), b.value());
    worst = std::max(worst, diff);
    json r;
    r["x"] = x;
    r["formula"] = ext(a);
    r["envelope"] = ext(b);
    rows.push_back(r);
  }
  cx.report["status"] = "ok";
  cx.report["mode"] = mode;
  cx.report["results"] = rows;
  cx.report["max_discrepancy"] = ext(worst);
  cx.out.summary = "envelope: " + std::to_string(rows.size()) + " points, max discrepancy " + ExtReal(worst).to_string();
}

void run_projlattice(Context& cx) {
  projlattice::FiniteSupremalSpec s{cx.spec.lattice.depth, cx.spec.lattice.H, cx.spec.lattice.q1_weight};
  s.validate();
  const auto rep = projlattice::verify_supremal_projection(s, cx.spec.params.level, cx.spec.queries);
  json lhs = json::array(), rhs = json::array();
  for (const auto& v : rep.lhs) lhs.push_back(ext(v));
  for (const auto& v : rep.rhs) rhs.push_back(ext(v));
  cx.report["status"] = "ok";
  cx.report["level"] = cx.spec.params.level;
  cx.report["points"] = rep.points;
  cx.report["max_discrepancy"] = rep.max_discrepancy;
  cx.report["sup_projection"] = lhs;
  cx.report["level_supremal"] = rhs;
  cx.out.summary = "projlattice: " + std::to_string(rep.points) + " points, max discrepancy " +
                   ExtReal(rep.max_discrepancy).to_string();
}

void run_duality(Context& cx) {
  const GridFunction f = cx.field(cx.spec.F, "F");
  const ConeSpec cone = cx.cone();
  const DiscreteMeasure nu = cx.nu();
  const auto primal = supremal_value(cx.d, cone, nu, f, cx.duality());
  const auto dual = affine_sweep_dual(cx.d, cone, nu, f, cx.duality());
  cx.report["status"] = "ok";
  cx.report["primal"] = ext(primal.value);
  cx.report["dual"] = ext(dual.value);
  cx.report["gap"] = ext(gap_of(primal.value.value(), dual.value.value()));
  cx.certificate(dual.certificate);
  if (dual.certificate) {
    cx.report["certificate_verified"] =
        jensen_verify(cx.d, cone, nu, dual.certificate->mu, dual.certificate->c, std::max(cx.tol, 1e-9));
  }
  if (primal.argmax) cx.emit("h", *primal.argmax);
  if (dual.certificate) {
    GridFunction mu(cx.d, 0.0);
    for (std::size_t p : cx.d.inside_nodes()) mu[p] = dual.certificate->mu[p];
    cx.emit("mu", mu);
  }
  cx.out.summary = cx.spec.command + ": primal=" + primal.value.to_string() + " dual=" + dual.value.to_string();
}

void run_balayage(Context& cx) {
  const DiscreteMeasure mu = cx.nu();
  const SubDomain u1 = cx.rect(cx.spec.params.u1, "params.U1");
  const DiscreteMeasure swept = balayage(mu, cx.d, u1);
  cx.report["status"] = "ok";
  cx.report["mass_in"] = mu.mass();
  cx.report["mass_out"] = swept.mass();
  cx.report["mass_error"] = std::abs(mu.mass() - swept.mass());
  cx.report["swept"] = sparse(cx.d, swept);
  GridFunction g(cx.d, 0.0);
  for (std::size_t p : cx.d.inside_nodes()) g[p] = swept[p];
  cx.emit("swept", g);
  cx.out.summary = "balayage: mass " + ExtReal(mu.mass()).to_string() + " -> " + ExtReal(swept.mass()).to_string();
}

void run_pipeline(Context& cx) {
  const GridFunction f = cx.field(cx.spec.F, "F");
  const GridFunction r = cx.field(cx.spec.params.radius, "params.radius");
  const auto rep = theorem71_pipeline(f, cx.nu(), cx.rect(cx.spec.params.u0, "params.U0"),
                                      cx.rect(cx.spec.params.u1, "params.U1"), r, cx.cone(), cx.d, cx.duality());
  cx.criterion(rep);
}

void run_criterion(Context& cx) {
  const GridFunction m = cx.field(cx.spec.M, "M");
  GridFunction u = divisor_log_potential(cx.divisor(cx.spec.divisor), cx.d);
  if (!cx.spec.divisor2.empty()) {
    const std::string mode = cx.spec.params.uq.empty() ? "max" : cx.spec.params.uq;
    if (mode != "max" && mode != "sqrt_sum") throw Error(ErrorCode::ParseError, "uq mode must be max or sqrt_sum");
    u = uq_potential(u, divisor_log_potential(cx.divisor(cx.spec.divisor2), cx.d), cx.d,
                     mode == "max" ? UqMode::Max : UqMode::SqrtSum);
  }
  const auto rep = minorant_criterion(u, m, cx.cone(), cx.nu(), cx.d, cx.duality());
  cx.criterion(rep);
  cx.emit("u", u);
}

void run_transform(Context& cx) {
  const GridFunction m = cx.field(cx.spec.M, "M");
  TransformParams tp;
  const std::string mode = cx.spec.params.mode.empty() ? "inf_dyadic" : cx.spec.params.mode;
  if (mode == "inf_dyadic") {
    tp.mode = TransformMode::InfDyadic;
    if (!cx.spec.params.radius.empty()) tp.smoothing = cx.spec.params.radius.build(cx.d, cx.seed);
  } else if (mode == "fixed_d") {
    tp.mode = TransformMode::FixedD;
    tp.radius = cx.field(cx.spec.params.radius, "params.radius");
  } else {
    throw Error(ErrorCode::ParseError, "transform mode must be inf_dyadic or fixed_d");
  }
  tp.a = cx.spec.params.a;
  tp.depth = cx.spec.params.depth;
  const GridFunction mt = weight_transform(m, cx.d, tp);
  cx.report["status"] = "ok";
  cx.report["mode"] = mode;
  cx.report["notes"] = json::array({"analytic step external"});
  cx.emit("M_tilde", mt);
  cx.out.summary = "transform: " + mode;
}

}  // namespace

RunOutput execute(const ProblemSpec& spec, const RunOptions& opt) {
  Context cx{spec, opt, opt.seed.value_or(spec.seed), opt.tol.value_or(spec.params.tol), GridDomain(), json(), {}, {}};
  if (!(cx.tol > 0.0)) throw Error(ErrorCode::ParseError, "tol must be positive");
  cx.report["command"] = spec.command;
  cx.report["seed"] = cx.seed;
  cx.report["tol"] = cx.tol;
  if (spec.command == "envelope") {
    run_envelope(cx);
  } else if (spec.command == "projlattice") {
    run_projlattice(cx);
  } else {
    cx.d = spec.grid.build();
    cx.report["grid"] = json::array({spec.grid.nx, spec.grid.ny, spec.grid.spacing});
    if (spec.command == "supremal" || spec.command == "dual")
      run_duality(cx);
    else if (spec.command == "balayage")
      run_balayage(cx);
    else if (spec.command == "pipeline")
      run_pipeline(cx);
    else if (spec.command == "criterion")
      run_criterion(cx);
    else if (spec.command == "transform")
      run_transform(cx);
    else
      throw Error(ErrorCode::ParseError, "unknown command '" + spec.command + "'");
    cx.report["fields"] = cx.fields;
  }
  cx.out.report = cx.report.dump(2) + "\n";
  return std::move(cx.out);
}

int run(const std::string& spec_path, const RunOptions& opt, bool quiet) {
  try {
    const ProblemSpec spec = load_problem(spec_path);
    if (!opt.expect_command.empty() && opt.expect_command != spec.command)
      throw Error(ErrorCode::ParseError, "problem command '" + spec.command + "' does not match '" +
                                             opt.expect_command + "'");
    const RunOutput out = execute(spec, opt);
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + opt.out_dir);
    const std::filesystem::path dir(opt.out_dir);
    write_atomic((dir / "report.json").string(), out.report);
    for (const auto& [name, content] : out.files) write_atomic((dir / name).string(), content);
    if (!quiet) std::cout << out.summary << "\n";
    return out.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace minorant::io
