#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqfa {

enum class ErrorCode {
  DimensionMismatch,
  NotSymmetric,
  NotPositiveDefinite,
  DegenerateDistance,
  EmptyClass,
  SingleSampleClass,
  ParseError,
  LabelOutOfRange,
  NoImprovingStep,
  TrainSmallerThanK,
  NonPositiveVariance,
  UnknownSpec,
  UnknownSweep,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. what() is "<CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& detail);

}  // namespace sqfa
