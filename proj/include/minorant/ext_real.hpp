#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <span>
#include <string>

namespace minorant {

/// A real number extended by +inf and -inf.
///
/// Arithmetic follows the order-theoretic conventions used throughout the
/// library:
///   (-inf) + k = -inf for k != +inf,  (+inf) + k = +inf for k != -inf,
///   t * (+inf) = +inf and t * (-inf) = -inf for t > 0 (signs flip for t < 0),
///   0 * (+-inf) = 0,
///   sup of nothing = -inf, inf of nothing = +inf.
/// Adding opposite infinities throws Error(UndefinedSum). NaN is never stored.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v);  // NOLINT(google-explicit-constructor): reals embed naturally

  static constexpr ExtReal plus_infinity() { return ExtReal(Raw{}, std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal minus_infinity() { return ExtReal(Raw{}, -std::numeric_limits<double>::infinity()); }

  constexpr double value() const { return v_; }
  bool is_finite() const { return std::isfinite(v_); }
  constexpr bool is_plus_infinity() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_minus_infinity() const { return v_ == -std::numeric_limits<double>::infinity(); }

  friend ExtReal operator+(ExtReal a, ExtReal b);
  friend ExtReal operator-(ExtReal a) { return ExtReal(Raw{}, -a.v_); }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

  constexpr auto operator<=>(const ExtReal&) const = default;

  /// "+inf", "-inf" or the shortest round-tripping decimal.
  std::string to_string() const;
  static ExtReal parse(const std::string& token);

 private:
  struct Raw {};
  constexpr ExtReal(Raw, double v) : v_(v) {}
  double v_ = 0.0;
};

/// t * x with the 0 * (+-inf) = 0 convention. t must be finite.
ExtReal scale(double t, ExtReal x);

ExtReal sup(std::span<const ExtReal> xs);
ExtReal inf(std::span<const ExtReal> xs);

}  // namespace minorant
