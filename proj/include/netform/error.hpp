#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netform {

enum class ErrorCode {
  // instance construction
  VertexOutOfRange,
  TooManyVertices,
  SelfLoop,
  DuplicateEdge,
  NegativeAffinity,
  NonPositiveInitWeight,
  DegenerateGame,
  ProbabilityNotNormalized,
  AllWeightsZero,
  NotAPartition,
  // evaluation
  UnknownEdge,
  BoundaryPoint,
  InvalidPoint,
  InvalidStart,
  StepSizeTooLarge,
  NotAnEquilibrium,
  NoConvergence,
  PropertyPViolated,
  NonpositiveSplit,
  TooLarge,
  InternalInconsistency,
  // harness
  WindowTooShort,
  NotStarGame,
  InvalidCampaign,
  // io
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The detail text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace netform
