#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqnls {

enum class ErrorKind {
  InvalidArgument,
  InvalidField,
  GridTooCoarse,
  GridMismatch,
  NoGroundState,
  ShootingBracketFailure,
  ConvergenceFailure,
  DecayFitFailure,
  DivisionByZeroField,
  ScaleOutOfRange,
  NoPohozaevScale,
  MultiplierOutOfRange,
  CurveRangeTooNarrow,
  OracleDidNotConverge,
  EigenConvergenceFailure,
  NumericalBlowUp,
  PerturbationOutOfRange,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

  /// Same kind, message prefixed with context.
  Error with_context(const std::string& context) const { return Error(kind_, context + ": " + message_); }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace cqnls
