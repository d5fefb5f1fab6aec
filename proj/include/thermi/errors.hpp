#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace thermi {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveProbability,
  DuplicateAtom,
  NotNormalized,
  NonPositiveVariance,
  AtomNotFound,
  BetaZero,
  NonFiniteIntegrand,
  NonFiniteValue,
  ToleranceNotReached,
  NonEquiprobablePrior,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveProbability: return "NonPositiveProbability";
    case ErrorCode::DuplicateAtom: return "DuplicateAtom";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::AtomNotFound: return "AtomNotFound";
    case ErrorCode::BetaZero: return "BetaZero";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::NonEquiprobablePrior: return "NonEquiprobablePrior";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Numeric failures (quadrature, differentiation) are distinguished from
/// argument errors so the CLI can map them onto separate exit codes.
constexpr bool is_numeric_failure(ErrorCode code) noexcept {
  return code == ErrorCode::NonFiniteIntegrand || code == ErrorCode::NonFiniteValue ||
         code == ErrorCode::ToleranceNotReached;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Short %g rendering of a number for error messages.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace thermi
