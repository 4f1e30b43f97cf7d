#include "sqfa/error.hpp"

namespace sqfa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateDistance: return "DegenerateDistance";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::SingleSampleClass: return "SingleSampleClass";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::NoImprovingStep: return "NoImprovingStep";
    case ErrorCode::TrainSmallerThanK: return "TrainSmallerThanK";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::UnknownSpec: return "UnknownSpec";
    case ErrorCode::UnknownSweep: return "UnknownSweep";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

void raise(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace sqfa
