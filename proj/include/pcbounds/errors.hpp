#ifndef PCBOUNDS_ERRORS_HPP
#define PCBOUNDS_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcbounds {

enum class ErrorCode {
  NegativeProbability,
  NonFiniteProbability,
  RowSumViolation,
  ArityMismatch,
  ThresholdOutOfRange,
  SchemaError,
  UndefinedPC,
  UndefinedRiskRatio,
  TheoremViolation,
  InfeasibleResolution,
  DegenerateGeneration,
  EmptyExperiment,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::NonFiniteProbability: return "NonFiniteProbability";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::ThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UndefinedPC: return "UndefinedPC";
    case ErrorCode::UndefinedRiskRatio: return "UndefinedRiskRatio";
    case ErrorCode::TheoremViolation: return "TheoremViolation";
    case ErrorCode::InfeasibleResolution: return "InfeasibleResolution";
    case ErrorCode::DegenerateGeneration: return "DegenerateGeneration";
    case ErrorCode::EmptyExperiment: return "EmptyExperiment";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by malformed input rather than by the math.
  bool is_input_error() const noexcept {
    switch (code_) {
      case ErrorCode::NegativeProbability:
      case ErrorCode::NonFiniteProbability:
      case ErrorCode::RowSumViolation:
      case ErrorCode::ArityMismatch:
      case ErrorCode::ThresholdOutOfRange:
      case ErrorCode::SchemaError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace pcbounds

#endif  // PCBOUNDS_ERRORS_HPP
