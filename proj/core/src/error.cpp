#include "lwb/error.hpp"

namespace lwb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::ZeroProbabilityEntry: return "ZeroProbabilityEntry";
    case ErrorCode::CovarianceMismatch: return "CovarianceMismatch";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::NotAperiodic: return "NotAperiodic";
    case ErrorCode::DomainTooLarge: return "DomainTooLarge";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::GeometryInvalid: return "GeometryInvalid";
    case ErrorCode::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
    case ErrorCode::LadderInvalid: return "LadderInvalid";
    case ErrorCode::TraceIncomplete: return "TraceIncomplete";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::PrecisionBudgetExceeded: return "PrecisionBudgetExceeded";
    case ErrorCode::DegenerateW: return "DegenerateW";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace lwb
