#include "minorant/ext_real.hpp"

#include <algorithm>
#include <charconv>
#include <system_error>

#include "minorant/error.hpp"

namespace minorant {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UndefinedSum: return "UNDEFINED_SUM";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::LevelOutOfRange: return "LEVEL_OUT_OF_RANGE";
    case ErrorCode::NumericalBreakdown: return "NUMERICAL_BREAKDOWN";
    case ErrorCode::NotInterior: return "NOT_INTERIOR";
    case ErrorCode::InfiniteValue: return "INFINITE_VALUE";
    case ErrorCode::Singular: return "SINGULAR";
    case ErrorCode::NodeOutsideSubdomain: return "NODE_OUTSIDE_SUBDOMAIN";
    case ErrorCode::InfiniteBoundaryValue: return "INFINITE_BOUNDARY_VALUE";
    case ErrorCode::NotHarmonic: return "NOT_HARMONIC";
    case ErrorCode::MultiplyConnected: return "MULTIPLY_CONNECTED";
    case ErrorCode::EmptyMargin: return "EMPTY_MARGIN";
    case ErrorCode::BallLeavesDomain: return "BALL_LEAVES_DOMAIN";
    case ErrorCode::SupportViolation: return "SUPPORT_VIOLATION";
    case ErrorCode::RadiusTooSmall: return "RADIUS_TOO_SMALL";
    case ErrorCode::RingTooSparse: return "RING_TOO_SPARSE";
    case ErrorCode::DomainMismatch: return "DOMAIN_MISMATCH";
    case ErrorCode::NotFeasible: return "NOT_FEASIBLE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

ExtReal::ExtReal(double v) : v_(v) {
  if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "NaN is not an extended real");
}

ExtReal operator+(ExtReal a, ExtReal b) {
  if ((a.is_plus_infinity() && b.is_minus_infinity()) || (a.is_minus_infinity() && b.is_plus_infinity()))
    throw Error(ErrorCode::UndefinedSum, "(+inf) + (-inf)");
  return ExtReal(ExtReal::Raw{}, a.v_ + b.v_);
}

ExtReal scale(double t, ExtReal x) {
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "scale factor must be finite");
  if (x.is_finite()) return ExtReal(t * x.value());
  if (t == 0.0) return ExtReal(0.0);
  const bool positive = (t > 0.0) == x.is_plus_infinity();
  return positive ? ExtReal::plus_infinity() : ExtReal::minus_infinity();
}

ExtReal sup(std::span<const ExtReal> xs) {
  ExtReal best = ExtReal::minus_infinity();
  for (const auto& x : xs) best = std::max(best, x);
  return best;
}

ExtReal inf(std::span<const ExtReal> xs) {
  ExtReal best = ExtReal::plus_infinity();
  for (const auto& x : xs) best = std::min(best, x);
  return best;
}

std::string ExtReal::to_string() const {
  if (is_plus_infinity()) return "+inf";
  if (is_minus_infinity()) return "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v_);
  return std::string(buf, res.ptr);
}

ExtReal ExtReal::parse(const std::string& token) {
  if (token == "+inf" || token == "inf") return plus_infinity();
  if (token == "-inf") return minus_infinity();
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw Error(ErrorCode::ParseError, "not an extended real: '" + token + "'");
  return ExtReal(v);
}

}  // namespace minorant
