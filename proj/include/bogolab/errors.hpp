#pragma once

#include <stdexcept>
#include <string>

namespace bogolab {

// Machine-readable failure codes. The CLI maps any Error to exit code 1 and
// prints "code: message" so scripts can branch on the code alone.
enum class ErrorCode {
  InvalidArgument,
  SymmetryViolation,
  NonHermitianKinetic,
  NonFinite,
  NonPositiveKinetic,
  ProfileNotEven,
  MissingW2,
  ZeroVector,
  SizeOverflow,
  NoConvergence,
  NotStationary,
  NotStable,
  TargetUnstable,
  ConvergenceFailure,
  DimensionMismatch,
  InsufficientN,
  HypothesisViolated,
  DegenerateMinimizer,
  UnstableCondensate,
  InsufficientData,
  IoError,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::NonHermitianKinetic: return "NonHermitianKinetic";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonPositiveKinetic: return "NonPositiveKinetic";
    case ErrorCode::ProfileNotEven: return "ProfileNotEven";
    case ErrorCode::MissingW2: return "MissingW2";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::TargetUnstable: return "TargetUnstable";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientN: return "InsufficientN";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::DegenerateMinimizer: return "DegenerateMinimizer";
    case ErrorCode::UnstableCondensate: return "UnstableCondensate";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace bogolab
