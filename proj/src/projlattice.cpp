#include "minorant/projlattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minorant/error.hpp"

namespace minorant::projlattice {

void FiniteSupremalSpec::validate() const {
  if (depth == 0) throw Error(ErrorCode::InvalidArgument, "chain depth must be positive");
  if (!(q1_weight > 0.0) || !std::isfinite(q1_weight))
    throw Error(ErrorCode::InvalidArgument, "q1 weight must be positive and finite");
  for (const auto& h : H) {
    if (h.size() != depth) throw Error(ErrorCode::DimensionMismatch, "element of H has wrong depth");
    for (double c : h)
      if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "element of H has a non-finite coordinate");
  }
}

ChainElement project(const ChainElement& x, std::size_t n) {
  if (n == 0 || n > x.size()) throw Error(ErrorCode::LevelOutOfRange, "projection level out of range");
  return ChainElement(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
}

ChainElement lattice_sup(const std::vector<ChainElement>& b) {
  if (b.empty()) throw Error(ErrorCode::InvalidArgument, "lattice sup of an empty set");
  ChainElement v = b.front();
  for (const auto& e : b) {
    if (e.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "elements of different depth");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], e[i]);
  }
  return v;
}

namespace {

bool below_on_prefix(const ChainElement& h, const ChainElement& x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (h[i] > x[i]) return false;
  return true;
}

}  // namespace

ExtReal supremal(const FiniteSupremalSpec& spec, const ChainElement& x) {
  return level_supremal(spec, spec.depth, x);
}

ExtReal level_supremal(const FiniteSupremalSpec& spec, std::size_t n, const ChainElement& x_n) {
  spec.validate();
  if (n == 0 || n > spec.depth) throw Error(ErrorCode::LevelOutOfRange, "level out of range");
  if (x_n.size() != n) throw Error(ErrorCode::DimensionMismatch, "level vector has wrong length");
  ExtReal best = ExtReal::minus_infinity();
  for (const auto& h : spec.H)
    if (below_on_prefix(h, x_n, n)) best = std::max(best, ExtReal(spec.q(h)));
  return best;
}

double default_tail_bound(const FiniteSupremalSpec& spec) {
  double m = 0.0;
  for (const auto& h : spec.H)
    for (double c : h) m = std::max(m, std::abs(c));
  return 1.0 + 10.0 * m;
}

ExtReal sup_projection(const FiniteSupremalSpec& spec, std::size_t n, const ChainElement& x_n,
                       std::optional<double> tail_bound) {
  spec.validate();
  if (n == 0 || n > spec.depth) throw Error(ErrorCode::LevelOutOfRange, "level out of range");
  if (x_n.size() != n) throw Error(ErrorCode::DimensionMismatch, "level vector has wrong length");
  const double tail = tail_bound.value_or(default_tail_bound(spec));
  for (const auto& h : spec.H)
    for (std::size_t i = n; i < spec.depth; ++i)
      if (h[i] > tail) throw Error(ErrorCode::InvalidArgument, "tail bound below a coordinate of H");
  ChainElement x = x_n;
  x.resize(spec.depth, tail);
  return supremal(spec, x);
}

ProjectionReport verify_supremal_projection(const FiniteSupremalSpec& spec, std::size_t n,
                                            const std::vector<ChainElement>& grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty evaluation grid");
  ProjectionReport rep;
  rep.points = grid.size();
  for (const auto& x_n : grid) {
    const ExtReal a = sup_projection(spec, n, x_n);
    const ExtReal b = level_supremal(spec, n, x_n);
    rep.lhs.push_back(a);
    rep.rhs.push_back(b);
    double gap = 0.0;
    if (a.is_finite() && b.is_finite()) gap = std::abs(a.value() - b.value());
    else if (a != b) gap = std::numeric_limits<double>::infinity();
    rep.max_discrepancy = std::max(rep.max_discrepancy, gap);
  }
  return rep;
}

StabilizationResult stabilized_limsup(const std::vector<ChainElement>& seq, const ChainElement& x) {
  const std::size_t depth = x.size();
  if (depth == 0 || seq.size() < depth)
    throw Error(ErrorCode::InvalidArgument, "sequence shorter than the chain depth");
  for (const auto& e : seq)
    if (e.size() != depth) throw Error(ErrorCode::DimensionMismatch, "sequence elements of different depth");

  StabilizationResult res;
  res.is_stabilizing = true;
  for (std::size_t k = 1; k <= seq.size() && res.is_stabilizing; ++k) {
    const std::size_t n = std::min(k, depth);
    for (std::size_t i = 0; i < n; ++i)
      if (seq[k - 1][i] != x[i]) {
        res.is_stabilizing = false;
        break;
      }
  }
  if (!res.is_stabilizing) return res;

  // inf over n of the tail suprema; tails shrink, so the running minimum of
  // suffix maxima is taken from the back.
  ChainElement lim(depth, std::numeric_limits<double>::infinity());
  ChainElement tail_sup(depth, -std::numeric_limits<double>::infinity());
  for (std::size_t k = seq.size(); k-- > 0;) {
    for (std::size_t i = 0; i < depth; ++i) {
      tail_sup[i] = std::max(tail_sup[i], seq[k][i]);
      lim[i] = std::min(lim[i], tail_sup[i]);
    }
  }
  res.limsup = lim;
  return res;
}

}  // namespace minorant::projlattice
