#include "minorant/holo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minorant/error.hpp"
#include "minorant/potential.hpp"

namespace minorant {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t nearest_node(const GridDomain& d, double x, double y, bool* in_range) {
  const long ix = std::lround((x - d.origin_x()) / d.spacing());
  const long iy = std::lround((y - d.origin_y()) / d.spacing());
  *in_range = ix >= 0 && iy >= 0 && ix < d.nx() && iy < d.ny();
  return *in_range ? d.index(static_cast<int>(ix), static_cast<int>(iy)) : 0;
}

// C >= 0 minimal with lhs <= rhs + C wherever both sides are finite.
double excess(const GridDomain& d, const GridFunction& lhs, const GridFunction& rhs) {
  double c = 0.0;
  for (std::size_t p : d.inside_nodes())
    if (std::isfinite(lhs[p]) && std::isfinite(rhs[p])) c = std::max(c, lhs[p] - rhs[p]);
  return c;
}

void finish_feasible(CriterionReport& rep, const GridDomain& d, const DiscreteMeasure& nu, const GridFunction& lhs,
                     const GridFunction& rhs) {
  rep.C = excess(d, lhs, rhs);
  rep.integral_constant = *rep.C * nu.mass() - integrate(*rep.h, nu);
}

}  // namespace

void Divisor::validate(const GridDomain& d) const {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw Error(ErrorCode::InvalidArgument, "divisor point must be finite");
    if (a.multiplicity < 1) throw Error(ErrorCode::InvalidArgument, "divisor multiplicity must be at least 1");
    bool ok = false;
    const std::size_t p = nearest_node(d, a.x, a.y, &ok);
    if (!ok || !d.is_inside(p)) throw Error(ErrorCode::InvalidArgument, "divisor point lies outside the domain");
  }
}

GridFunction divisor_log_potential(const Divisor& z, const GridDomain& d) {
  z.validate(d);
  GridFunction u(d, 0.0);
  const double floor = 0.5 * d.spacing();
  for (std::size_t p : d.inside_nodes()) {
    double s = 0.0;
    for (const auto& a : z.atoms)
      s += a.multiplicity * std::log(std::max(std::hypot(d.x(p) - a.x, d.y(p) - a.y), floor));
    u[p] = s;
  }
  return u;
}

GridFunction uq_potential(const GridFunction& log_q1, const GridFunction& log_q2, const GridDomain& d, UqMode mode) {
  check_shape(d, log_q1);
  check_shape(d, log_q2);
  GridFunction out(d, 0.0);
  for (std::size_t p : d.inside_nodes()) {
    const double a = log_q1[p];
    const double b = log_q2[p];
    const double hi = std::max(a, b);
    if (mode == UqMode::Max || !std::isfinite(hi)) {
      out[p] = hi;
      continue;
    }
    const double lo = std::min(a, b);
    out[p] = hi + 0.5 * std::log1p(std::exp(2.0 * (lo - hi)));
  }
  return out;
}

GridFunction criterion_deficit(const GridFunction& u, const GridFunction& m, const GridDomain& d) {
  check_shape(d, u);
  check_shape(d, m);
  GridFunction f(d, 0.0);
  for (std::size_t p : d.inside_nodes()) {
    if (m[p] == -kInf && u[p] == -kInf)
      f[p] = kInf;
    else
      f[p] = (ExtReal(m[p]) - ExtReal(u[p])).value();
  }
  return f;
}

CriterionReport minorant_criterion(const GridFunction& u, const GridFunction& m, const ConeSpec& cone,
                                   const DiscreteMeasure& nu, const GridDomain& d, const DualityOptions& opt) {
  check_shape(d, nu);
  check_measure(d, nu);
  if (!(nu.mass() > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be nonzero");
  const GridFunction f = criterion_deficit(u, m, d);

  CriterionReport rep;
  PrimalResult primal = supremal_value(d, cone, nu, f, opt);
  rep.primal_value = primal.value;
  rep.feasible = !primal.value.is_minus_infinity();
  if (!rep.feasible) {
    rep.farkas = minorant_exists(d, cone, f).farkas;
  } else {
    rep.h = primal.argmax ? std::move(primal.argmax) : minorant_exists(d, cone, f).h;
    GridFunction lhs(d, 0.0);
    for (std::size_t p : d.inside_nodes()) lhs[p] = (ExtReal(u[p]) + ExtReal((*rep.h)[p])).value();
    finish_feasible(rep, d, nu, lhs, m);
  }
  DualResult dual = affine_sweep_dual(d, cone, nu, f, opt);
  rep.dual_value = dual.value;
  rep.certificate = std::move(dual.certificate);
  return rep;
}

CriterionReport theorem71_pipeline(const GridFunction& f, const DiscreteMeasure& nu, const SubDomain& u0,
                                   const SubDomain& u1, const RadiusField& r, const ConeSpec& cone,
                                   const GridDomain& d, const DualityOptions& opt) {
  check_shape(d, f);
  check_shape(d, nu);
  check_measure(d, nu);
  if (!(nu.mass() > 0.0)) throw Error(ErrorCode::InvalidArgument, "nu must be nonzero");
  for (std::size_t p : nu.support())
    if (!u0.member(p)) throw Error(ErrorCode::SupportViolation, "nu charges a node outside U0");

  const RadiusField rhat = refine_radius(r, d, u0, u1);
  const GridFunction g = variable_smooth(f, rhat, d);
  const GridFunction fbal = harmonic_extension(g, d, u1);

  CriterionReport rep;
  rep.notes.push_back("analytic step external");
  PrimalResult primal = supremal_value(d, cone, nu, fbal, opt);
  rep.primal_value = primal.value;
  rep.feasible = !primal.value.is_minus_infinity();
  if (!rep.feasible) {
    rep.farkas = minorant_exists(d, cone, fbal).farkas;
  } else {
    rep.h = primal.argmax ? std::move(primal.argmax) : minorant_exists(d, cone, fbal).h;
    finish_feasible(rep, d, nu, *rep.h, g);
  }
  DualResult dual = affine_sweep_dual(d, cone, nu, fbal, opt);
  rep.dual_value = dual.value;
  rep.certificate = std::move(dual.certificate);
  if (rep.certificate) {
    const DiscreteMeasure& mu = rep.certificate->mu;
    const DiscreteMeasure mubal = balayage(mu, d, u1);
    rep.ifbal_discrepancy = std::abs(integrate(fbal, mu) - integrate(g, mubal));
  }
  return rep;
}

GridFunction weight_transform(const GridFunction& m, const GridDomain& d, const TransformParams& params) {
  check_shape(d, m);
  if (!(params.a > 0.0)) throw Error(ErrorCode::InvalidArgument, "transform parameter a must be positive");
  const double h = d.spacing();
  GridFunction out(d, 0.0);
  auto tail = [&](std::size_t p) { return (1.0 + params.a) * std::log(2.0 + std::hypot(d.x(p), d.y(p))); };

  if (params.mode == TransformMode::InfDyadic) {
    if (params.depth < 1) throw Error(ErrorCode::InvalidArgument, "dyadic depth must be at least 1");
    const GridFunction src = params.smoothing ? variable_smooth(m, *params.smoothing, d) : m;
    for (std::size_t p : d.inside_nodes()) {
      const double dmax = std::min(1.0, d.distance_to_boundary(p));
      ExtReal best = ExtReal::plus_infinity();
      for (int j = 1; j <= params.depth; ++j) {
        const double rad = std::ldexp(dmax, -j);
        if (rad < h) break;
        ExtReal avg;
        try {
          avg = ball_average(src, d, p, rad);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::BallLeavesDomain) throw;
          continue;
        }
        best = std::min(best, avg + ExtReal(std::log(1.0 / rad)));
      }
      out[p] = (best + ExtReal(tail(p))).value();
    }
    return out;
  }

  if (!params.radius) throw Error(ErrorCode::InvalidArgument, "fixed_d needs a radius field");
  const RadiusField& rad = *params.radius;
  check_shape(d, rad);
  for (std::size_t p : d.inside_nodes()) {
    const double r = rad[p];
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "radius field must be finite and >= 0");
    if (r > 0.0 && !(r < std::min(1.0, d.distance_to_boundary(p))))
      throw Error(ErrorCode::InvalidArgument, "radius must stay below min(1, dist to boundary)");
    if (r == 0.0 || !d.is_interior(p)) continue;
    for (std::size_t q : d.neighbors(p))
      if (rad[q] > 0.0 && r > params.ratio_bound * rad[q])
        throw Error(ErrorCode::InvalidArgument, "radius field exceeds the ratio bound");
  }
  for (std::size_t p : d.inside_nodes()) {
    if (rad[p] == 0.0) {
      out[p] = kInf;
      continue;
    }
    const ExtReal v = ball_average(m, d, p, rad[p]) + ExtReal(std::log(1.0 / rad[p]) + tail(p));
    out[p] = v.value();
  }
  return out;
}

ZeroSetResult zero_set_construct(const Divisor& z, const GridFunction& m, std::size_t z0, const GridDomain& d,
                                 const DualityOptions& opt) {
  if (d.euler_characteristic() != 1) throw Error(ErrorCode::MultiplyConnected, "domain is not simply connected");
  if (z0 >= d.size() || !d.is_inside(z0)) throw Error(ErrorCode::InvalidArgument, "z0 must be an inside node");
  const GridFunction u = divisor_log_potential(z, d);
  DiscreteMeasure nu(d);
  nu[z0] = 1.0;

  ZeroSetResult res;
  res.report = minorant_criterion(u, m, ConeSpec::harmonic(d), nu, d, opt);
  if (!res.report.feasible) throw Error(ErrorCode::NotFeasible, "no harmonic minorant of M - u exists");
  // Re-solve from the boundary values to drop the simplex rounding.
  res.h = solve_dirichlet(d, *res.report.h);
  res.log_f = GridFunction(d, 0.0);
  for (std::size_t p : d.inside_nodes()) res.log_f[p] = u[p] + res.h[p];
  res.C = excess(d, res.log_f, m);
  const ConjugateResult conj = harmonic_conjugate(res.h, d, z0);
  res.g_conjugate = conj.v;
  res.max_residue = conj.max_residue;
  return res;
}

}  // namespace minorant
