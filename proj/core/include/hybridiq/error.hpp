#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hybridiq {

enum class ErrorCode {
  NotHermitian,
  NumericalFailure,
  DimensionMismatch,
  NotAState,
  BadRange,
  BadMap,
  SpaceMismatch,
  NotPositive,
  NotNormalized,
  BadEffect,
  BadEvent,
  ZeroMassCell,
  ZeroProbability,
  IncompleteChannel,
  ShapeMismatch,
  BadKernel,
  IncompleteKraus,
  NotPSDCoefficients,
  BadBasis,
  NotAnEnsemble,
  IncompleteInstrument,
  RecordSpaceTooLarge,
  ParseError,
  IoError,
  UnknownSuite,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; code() carries
// the machine-readable kind, what() a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hybridiq
