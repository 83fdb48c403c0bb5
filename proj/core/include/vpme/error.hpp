#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vpme {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  InvalidArgument,
  InvalidEnsemble,
  ResolutionNotPowerOfTwo,
  EpsilonMismatch,
  NegativeDensity,
  NewtonDivergence,
  UnequalMass,
  OutOfRange,
  MissingHistory,
  ProblemTooLarge,
  NotConverged,
  NoRoot,
  CheckpointMismatch,
  UnknownFamily,
  BelowResolutionFloor,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code);

/// Exception type used throughout the library. `code()` is stable and can be
/// matched on by callers; `what()` carries a human-readable context string.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The context string without the code prefix, for re-wrapping.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace vpme
