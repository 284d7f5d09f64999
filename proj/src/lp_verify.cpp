#include <algorithm>
#include <cmath>
#include <sstream>

#include "minorant/lp.hpp"

namespace minorant::lp {

namespace {

double row_activity(const Row& r, const std::vector<double>& x, double* magnitude) {
  double act = 0.0, mag = 0.0;
  for (const auto& t : r.terms) {
    act += t.coef * x[t.var];
    mag += std::abs(t.coef * x[t.var]);
  }
  if (magnitude) *magnitude = mag;
  return act;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v)
    if (std::isfinite(x)) m = std::max(m, std::abs(x));
  return m;
}

// Worst violation of rows and bounds at x, each scaled by the size of the
// quantities involved.
double primal_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& r : lp.rows()) {
    double mag = 0.0;
    const double act = row_activity(r, x, &mag);
    const double scale = 1.0 + std::abs(r.rhs) + mag;
    double v = 0.0;
    switch (r.relation) {
      case Relation::LessEqual: v = act - r.rhs; break;
      case Relation::GreaterEqual: v = r.rhs - act; break;
      case Relation::Equal: v = std::abs(act - r.rhs); break;
    }
    worst = std::max(worst, v / scale);
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (std::isfinite(lp.lower()[j])) worst = std::max(worst, (lp.lower()[j] - x[j]) / (1.0 + std::abs(lp.lower()[j])));
    if (std::isfinite(lp.upper()[j])) worst = std::max(worst, (x[j] - lp.upper()[j]) / (1.0 + std::abs(lp.upper()[j])));
  }
  return worst;
}

}  // namespace

Verification verify(const LinearProgram& lp, const Outcome& outcome, double tol) {
  Verification v;
  std::ostringstream msg;
  const std::size_t n = lp.num_vars();
  const double dir = lp.sense() == Sense::Maximize ? -1.0 : 1.0;

  if (outcome.status == Status::Optimal) {
    if (outcome.primal.size() != n || outcome.dual.size() != lp.num_rows()) {
      v.message = "solution vectors have wrong size";
      return v;
    }
    const auto& x = outcome.primal;
    v.primal_residual = primal_violation(lp, x);

    // Multipliers for the minimization form: >= rows need z >= 0, <= rows z <= 0.
    std::vector<double> z(lp.num_rows());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = dir * outcome.dual[i];
    const double cscale = 1.0 + max_abs(lp.cost()) + max_abs(z);
    double dres = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const Relation rel = lp.rows()[i].relation;
      if (rel == Relation::GreaterEqual) dres = std::max(dres, -z[i] / cscale);
      if (rel == Relation::LessEqual) dres = std::max(dres, z[i] / cscale);
    }
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = dir * lp.cost()[j];
    for (std::size_t i = 0; i < z.size(); ++i)
      for (const auto& t : lp.rows()[i].terms) d[t.var] -= z[i] * t.coef;
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) dual_obj += z[i] * lp.rows()[i].rhs;
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = lp.lower()[j], up = lp.upper()[j];
      const double small = tol * cscale;
      if (d[j] > small) {
        if (!std::isfinite(lo)) dres = std::max(dres, d[j] / cscale);
        dual_obj += d[j] * (std::isfinite(lo) ? lo : x[j]);
      } else if (d[j] < -small) {
        if (!std::isfinite(up)) dres = std::max(dres, -d[j] / cscale);
        dual_obj += d[j] * (std::isfinite(up) ? up : x[j]);
      } else {
        dual_obj += d[j] * x[j];
      }
    }
    v.dual_residual = dres;
    double primal_obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) primal_obj += dir * lp.cost()[j] * x[j];
    v.dual_objective = dir * dual_obj;
    v.gap = std::abs(primal_obj - dual_obj);
    const bool gap_ok = v.gap <= tol * (1.0 + std::abs(primal_obj));
    v.ok = v.primal_residual <= tol && v.dual_residual <= tol && gap_ok;
    if (!v.ok)
      msg << "primal residual " << v.primal_residual << ", dual residual " << v.dual_residual << ", gap " << v.gap;
  } else if (outcome.status == Status::Unbounded) {
    if (outcome.primal.size() != n || outcome.ray.size() != n) {
      v.message = "unbounded certificate has wrong size";
      return v;
    }
    v.primal_residual = primal_violation(lp, outcome.primal);
    const auto& r = outcome.ray;
    const double rscale = 1.0 + max_abs(r);
    double worst = 0.0;
    for (const auto& row : lp.rows()) {
      double mag = 0.0;
      const double act = row_activity(row, r, &mag) / (rscale + mag);
      switch (row.relation) {
        case Relation::LessEqual: worst = std::max(worst, act); break;
        case Relation::GreaterEqual: worst = std::max(worst, -act); break;
        case Relation::Equal: worst = std::max(worst, std::abs(act)); break;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isfinite(lp.lower()[j])) worst = std::max(worst, -r[j] / rscale);
      if (std::isfinite(lp.upper()[j])) worst = std::max(worst, r[j] / rscale);
    }
    double improve = 0.0;
    for (std::size_t j = 0; j < n; ++j) improve += dir * lp.cost()[j] * r[j];
    v.dual_residual = worst;
    v.ok = v.primal_residual <= tol && worst <= tol && improve < -tol;
    if (!v.ok) msg << "ray residual " << worst << ", improvement " << improve << ", point residual " << v.primal_residual;
  } else {
    if (outcome.farkas.size() != lp.num_rows()) {
      v.message = "Farkas vector has wrong size";
      return v;
    }
    // Rows in >= form: sum_i y_i s_i a_i . x >= sum_i y_i s_i b_i with s_i = -1 for <= rows.
    std::vector<double> g(n, 0.0);
    double yb = 0.0, yscale = 0.0;
    double sign_violation = 0.0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
      const Row& row = lp.rows()[i];
      const double y = outcome.farkas[i];
      const double s = row.relation == Relation::LessEqual ? -1.0 : 1.0;
      if (row.relation != Relation::Equal) sign_violation = std::max(sign_violation, -y);
      for (const auto& t : row.terms) g[t.var] += y * s * t.coef;
      yb += y * s * row.rhs;
      yscale += std::abs(y) * (1.0 + std::abs(row.rhs));
    }
    // Largest value g.x can take inside the bounds.
    double best = 0.0;
    bool finite = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double gj = std::abs(g[j]) <= tol * (1.0 + yscale) ? 0.0 : g[j];
      if (gj > 0.0) {
        if (!std::isfinite(lp.upper()[j])) finite = false;
        else best += gj * lp.upper()[j];
      } else if (gj < 0.0) {
        if (!std::isfinite(lp.lower()[j])) finite = false;
        else best += gj * lp.lower()[j];
      }
    }
    v.dual_residual = sign_violation / (1.0 + yscale);
    v.gap = finite ? yb - best : 0.0;
    v.ok = finite && v.dual_residual <= tol && v.gap > tol * (1.0 + yscale) * 1e-3;
    if (!v.ok) msg << "Farkas check failed: bounded=" << finite << " margin " << v.gap;
  }
  v.message = msg.str();
  return v;
}

}  // namespace minorant::lp
