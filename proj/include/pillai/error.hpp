#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pillai {

enum class ErrorKind {
  InvalidArgument,
  NonPositiveInput,
  ContainsZero,
  AmbiguousNearestInteger,
  PrecisionExhausted,
  NotReduced,
  HypothesisViolated,
  ConventionMismatch,
  IndexBeyondCertified,
  EpsilonNeverPositive,
  SoundnessViolation,
  ConfigError,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonPositiveInput: return "NonPositiveInput";
    case ErrorKind::ContainsZero: return "ContainsZero";
    case ErrorKind::AmbiguousNearestInteger: return "AmbiguousNearestInteger";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::NotReduced: return "NotReduced";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ConventionMismatch: return "ConventionMismatch";
    case ErrorKind::IndexBeyondCertified: return "IndexBeyondCertified";
    case ErrorKind::EpsilonNeverPositive: return "EpsilonNeverPositive";
    case ErrorKind::SoundnessViolation: return "SoundnessViolation";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pillai
