#include "hybridiq/error.hpp"

namespace hybridiq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotAState: return "NotAState";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadMap: return "BadMap";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::BadEffect: return "BadEffect";
    case ErrorCode::BadEvent: return "BadEvent";
    case ErrorCode::ZeroMassCell: return "ZeroMassCell";
    case ErrorCode::ZeroProbability: return "ZeroProbability";
    case ErrorCode::IncompleteChannel: return "IncompleteChannel";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadKernel: return "BadKernel";
    case ErrorCode::IncompleteKraus: return "IncompleteKraus";
    case ErrorCode::NotPSDCoefficients: return "NotPSDCoefficients";
    case ErrorCode::BadBasis: return "BadBasis";
    case ErrorCode::NotAnEnsemble: return "NotAnEnsemble";
    case ErrorCode::IncompleteInstrument: return "IncompleteInstrument";
    case ErrorCode::RecordSpaceTooLarge: return "RecordSpaceTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
  }
  return "Unknown";
}

}  // namespace hybridiq
