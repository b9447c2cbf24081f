#include "netform/error.hpp"

namespace netform {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::TooManyVertices: return "TooManyVertices";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NegativeAffinity: return "NegativeAffinity";
    case ErrorCode::NonPositiveInitWeight: return "NonPositiveInitWeight";
    case ErrorCode::DegenerateGame: return "DegenerateGame";
    case ErrorCode::ProbabilityNotNormalized: return "ProbabilityNotNormalized";
    case ErrorCode::AllWeightsZero: return "AllWeightsZero";
    case ErrorCode::NotAPartition: return "NotAPartition";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::InvalidStart: return "InvalidStart";
    case ErrorCode::StepSizeTooLarge: return "StepSizeTooLarge";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PropertyPViolated: return "PropertyPViolated";
    case ErrorCode::NonpositiveSplit: return "NonpositiveSplit";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NotStarGame: return "NotStarGame";
    case ErrorCode::InvalidCampaign: return "InvalidCampaign";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace netform
