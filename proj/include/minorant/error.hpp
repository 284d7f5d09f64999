#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace minorant {

enum class ErrorCode {
  UndefinedSum,
  DimensionMismatch,
  LevelOutOfRange,
  NumericalBreakdown,
  NotInterior,
  InfiniteValue,
  Singular,
  NodeOutsideSubdomain,
  InfiniteBoundaryValue,
  NotHarmonic,
  MultiplyConnected,
  EmptyMargin,
  BallLeavesDomain,
  SupportViolation,
  RadiusTooSmall,
  RingTooSparse,
  DomainMismatch,
  NotFeasible,
  InvalidArgument,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// that the CLI can map it to a stable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace minorant
