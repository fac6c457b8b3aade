#include "bunchkit/error.hpp"

namespace bunchkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::MaxDepthExceeded: return "MaxDepthExceeded";
    case ErrorCode::MismatchedFamily: return "MismatchedFamily";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::RatioAboveOne: return "RatioAboveOne";
    case ErrorCode::NonMonotoneTransform: return "NonMonotoneTransform";
    case ErrorCode::MedianInOpenBin: return "MedianInOpenBin";
    case ErrorCode::OptimizerFailed: return "OptimizerFailed";
    case ErrorCode::MeanUndefined: return "MeanUndefined";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

}  // namespace bunchkit
