#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace devitensor {

enum class ErrorCode {
  OrderOverflow,
  OrderUnderflow,
  InvalidSlots,
  NotOrthogonal,
  NonFinite,
  NotSymmetric,
  NotTotallySymmetric,
  NotTraceless,
  SymmetryViolation,
  NotInImage,
  DegenerateSpectrum,
  UnsupportedOrder,
  ZeroPolynomial,
  NoConvergence,
  PairingFailure,
  ReconstructionFailure,
  NonPositiveCompliance,
  ConfigurationAmbiguous,
  ParseError,
  DimensionError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OrderOverflow: return "OrderOverflow";
    case ErrorCode::OrderUnderflow: return "OrderUnderflow";
    case ErrorCode::InvalidSlots: return "InvalidSlots";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotTotallySymmetric: return "NotTotallySymmetric";
    case ErrorCode::NotTraceless: return "NotTraceless";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::NotInImage: return "NotInImage";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PairingFailure: return "PairingFailure";
    case ErrorCode::ReconstructionFailure: return "ReconstructionFailure";
    case ErrorCode::NonPositiveCompliance: return "NonPositiveCompliance";
    case ErrorCode::ConfigurationAmbiguous: return "ConfigurationAmbiguous";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionError: return "DimensionError";
  }
  return "Unknown";
}

/// Numerical failures (as opposed to invalid input) map to CLI exit code 2.
constexpr bool is_numerical_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::PairingFailure:
    case ErrorCode::ReconstructionFailure:
    case ErrorCode::ConfigurationAmbiguous:
    case ErrorCode::DegenerateSpectrum:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace devitensor
