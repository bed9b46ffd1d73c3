#include "cqnls/error.hpp"

namespace cqnls {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidField: return "InvalidField";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NoGroundState: return "NoGroundState";
    case ErrorKind::ShootingBracketFailure: return "ShootingBracketFailure";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DecayFitFailure: return "DecayFitFailure";
    case ErrorKind::DivisionByZeroField: return "DivisionByZeroField";
    case ErrorKind::ScaleOutOfRange: return "ScaleOutOfRange";
    case ErrorKind::NoPohozaevScale: return "NoPohozaevScale";
    case ErrorKind::MultiplierOutOfRange: return "MultiplierOutOfRange";
    case ErrorKind::CurveRangeTooNarrow: return "CurveRangeTooNarrow";
    case ErrorKind::OracleDidNotConverge: return "OracleDidNotConverge";
    case ErrorKind::EigenConvergenceFailure: return "EigenConvergenceFailure";
    case ErrorKind::NumericalBlowUp: return "NumericalBlowUp";
    case ErrorKind::PerturbationOutOfRange: return "PerturbationOutOfRange";
  }
  return "Unknown";
}

}  // namespace cqnls
