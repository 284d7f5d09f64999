#pragma once

#include <cstddef>
#include <vector>

#include "minorant/ext_real.hpp"

namespace minorant {

/// Finitely many samples (x_k, f(x_k)) of a function on R^d.
struct SampledFunction {
  std::size_t dim = 0;
  std::vector<std::vector<double>> points;
  std::vector<double> values;

  /// Throws InvalidArgument unless points are pairwise distinct, all values
  /// finite, sizes agree and are >= 1; DimensionMismatch on a wrong-length point.
  void validate(std::size_t max_dim = 8, std::size_t max_points = 64) const;
};

enum class MinorantMode { Conic, Convex };
enum class EnvelopeFamily { Linear, Affine };

/// inf { sum t_k f(x_k) : sum t_k x_k = x, t >= 0 [, sum t_k = 1] }.
/// +inf when no combination reaches x, -inf when the infimum is unbounded.
ExtReal minorant_formula(const SampledFunction& f, const std::vector<double>& x, MinorantMode mode);

/// sup { g(x) : g linear (or affine), g(x_k) <= f(x_k) for every sample }.
/// -inf when no member of the family lies below the samples.
ExtReal lower_envelope(const SampledFunction& f, const std::vector<double>& x, EnvelopeFamily family);

}  // namespace minorant
