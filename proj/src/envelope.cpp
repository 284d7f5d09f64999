#include "minorant/envelope.hpp"

#include <cmath>
#include <set>

#include "minorant/error.hpp"
#include "minorant/lp.hpp"

namespace minorant {

void SampledFunction::validate(std::size_t max_dim, std::size_t max_points) const {
  if (dim == 0 || dim > max_dim) throw Error(ErrorCode::InvalidArgument, "sample dimension out of range");
  if (points.empty() || points.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "points and values must be nonempty and of equal length");
  if (points.size() > max_points) throw Error(ErrorCode::InvalidArgument, "too many sample points");
  std::set<std::vector<double>> seen;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != dim) throw Error(ErrorCode::DimensionMismatch, "sample point has wrong dimension");
    for (double c : points[k])
      if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "sample coordinate is not finite");
    if (!std::isfinite(values[k])) throw Error(ErrorCode::InvalidArgument, "sample value is not finite");
    if (!seen.insert(points[k]).second) throw Error(ErrorCode::InvalidArgument, "duplicate sample point");
  }
}

namespace {

void check_query(const SampledFunction& f, const std::vector<double>& x) {
  f.validate();
  if (x.size() != f.dim) throw Error(ErrorCode::DimensionMismatch, "query point has wrong dimension");
}

}  // namespace

ExtReal minorant_formula(const SampledFunction& f, const std::vector<double>& x, MinorantMode mode) {
  check_query(f, x);
  lp::LinearProgram prog(lp::Sense::Minimize);
  const std::size_t m = f.points.size();
  for (std::size_t k = 0; k < m; ++k) prog.add_variable(0.0, lp::kInfinity, f.values[k]);
  for (std::size_t i = 0; i < f.dim; ++i) {
    std::vector<lp::Term> terms;
    for (std::size_t k = 0; k < m; ++k)
      if (f.points[k][i] != 0.0) terms.push_back({k, f.points[k][i]});
    prog.add_row(std::move(terms), lp::Relation::Equal, x[i]);
  }
  if (mode == MinorantMode::Convex) {
    std::vector<lp::Term> terms;
    for (std::size_t k = 0; k < m; ++k) terms.push_back({k, 1.0});
    prog.add_row(std::move(terms), lp::Relation::Equal, 1.0);
  }
  const lp::Outcome out = lp::solve(prog);
  switch (out.status) {
    case lp::Status::Infeasible: return ExtReal::plus_infinity();
    case lp::Status::Unbounded: return ExtReal::minus_infinity();
    case lp::Status::Optimal: break;
  }
  return out.objective;
}

ExtReal lower_envelope(const SampledFunction& f, const std::vector<double>& x, EnvelopeFamily family) {
  check_query(f, x);
  lp::LinearProgram prog(lp::Sense::Maximize);
  for (std::size_t i = 0; i < f.dim; ++i) prog.add_variable(-lp::kInfinity, lp::kInfinity, x[i]);
  const bool affine = family == EnvelopeFamily::Affine;
  const std::size_t beta = affine ? prog.add_variable(-lp::kInfinity, lp::kInfinity, 1.0) : 0;
  for (std::size_t k = 0; k < f.points.size(); ++k) {
    std::vector<lp::Term> terms;
    for (std::size_t i = 0; i < f.dim; ++i)
      if (f.points[k][i] != 0.0) terms.push_back({i, f.points[k][i]});
    if (affine) terms.push_back({beta, 1.0});
    prog.add_row(std::move(terms), lp::Relation::LessEqual, f.values[k]);
  }
  const lp::Outcome out = lp::solve(prog);
  switch (out.status) {
    case lp::Status::Infeasible: return ExtReal::minus_infinity();
    case lp::Status::Unbounded: return ExtReal::plus_infinity();
    case lp::Status::Optimal: break;
  }
  return out.objective;
}

}  // namespace minorant
