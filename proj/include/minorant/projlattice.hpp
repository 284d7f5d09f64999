#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "minorant/ext_real.hpp"

namespace minorant::projlattice {

/// Depth-N truncation of an element of the product lattice R x R x ...;
/// level n keeps the first n coordinates.
using ChainElement = std::vector<double>;

/// H is a finite family in the chain; q = q1 o pr_1 with q1(t) = q1_weight * t.
struct FiniteSupremalSpec {
  std::size_t depth = 0;
  std::vector<ChainElement> H;
  double q1_weight = 1.0;

  /// InvalidArgument unless depth >= 1, every element has length depth with
  /// finite coordinates, and q1_weight > 0.
  void validate() const;
  double q(const ChainElement& x) const { return q1_weight * x.at(0); }
};

/// First n coordinates. LevelOutOfRange unless 1 <= n <= x.size().
ChainElement project(const ChainElement& x, std::size_t n);

/// Componentwise supremum of a nonempty finite set.
ChainElement lattice_sup(const std::vector<ChainElement>& b);

/// spf_{H,q}(x) = max { q(h) : h in H, h <= x }, -inf when no h lies below x.
ExtReal supremal(const FiniteSupremalSpec& spec, const ChainElement& x);

/// spf_{H_n,q_n}(x_n) with H_n = pr_n H and q_n = q1 o pr_1 on level n.
ExtReal level_supremal(const FiniteSupremalSpec& spec, std::size_t n, const ChainElement& x_n);

/// 1 + 10 * max |coordinate of H|.
double default_tail_bound(const FiniteSupremalSpec& spec);

/// sup { spf_{H,q}(x) : pr_n x = x_n }, evaluated at the extension of x_n by
/// tail_bound in every deeper coordinate. Exact because spf is increasing and
/// tail_bound dominates every coordinate of H.
ExtReal sup_projection(const FiniteSupremalSpec& spec, std::size_t n, const ChainElement& x_n,
                       std::optional<double> tail_bound = std::nullopt);

struct ProjectionReport {
  std::size_t points = 0;
  double max_discrepancy = 0.0;  // 0 when both sides are the same infinity
  std::vector<ExtReal> lhs;      // sup-projection of spf_{H,q}
  std::vector<ExtReal> rhs;      // spf_{H_n,q_n}
};

ProjectionReport verify_supremal_projection(const FiniteSupremalSpec& spec, std::size_t n,
                                            const std::vector<ChainElement>& grid);

struct StabilizationResult {
  bool is_stabilizing = false;
  std::optional<ChainElement> limsup;
};

/// seq[k-1] is the k-th term. The sequence stabilizes to x when pr_n seq[k] =
/// pr_n x for all k >= n, checked up to the stored depth; limsup is the
/// coordinatewise inf_n sup_{k>=n} and is reported only for stabilizing input.
/// InvalidArgument when seq is shorter than the depth or lengths differ.
StabilizationResult stabilized_limsup(const std::vector<ChainElement>& seq, const ChainElement& x);

}  // namespace minorant::projlattice
