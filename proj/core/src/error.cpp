#include "vpme/error.hpp"

namespace vpme {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NonFinite: return "non_finite";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::InvalidEnsemble: return "invalid_ensemble";
    case ErrorCode::ResolutionNotPowerOfTwo: return "resolution_not_power_of_two";
    case ErrorCode::EpsilonMismatch: return "epsilon_mismatch";
    case ErrorCode::NegativeDensity: return "negative_density";
    case ErrorCode::NewtonDivergence: return "newton_divergence";
    case ErrorCode::UnequalMass: return "unequal_mass";
    case ErrorCode::OutOfRange: return "out_of_range";
    case ErrorCode::MissingHistory: return "missing_history";
    case ErrorCode::ProblemTooLarge: return "problem_too_large";
    case ErrorCode::NotConverged: return "not_converged";
    case ErrorCode::NoRoot: return "no_root";
    case ErrorCode::CheckpointMismatch: return "checkpoint_mismatch";
    case ErrorCode::UnknownFamily: return "unknown_family";
    case ErrorCode::BelowResolutionFloor: return "below_resolution_floor";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace vpme
