#include "calderon/error.hpp"

namespace calderon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::kAsymmetric: return "Asymmetric";
    case ErrorCode::kDegenerateDeterminant: return "DegenerateDeterminant";
    case ErrorCode::kDimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::kUnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::kBoundaryLayerRequested: return "BoundaryLayerRequested";
    case ErrorCode::kSingularInteriorBlock: return "SingularInteriorBlock";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::kMissingAnalyticGradient: return "MissingAnalyticGradient";
    case ErrorCode::kFactorTooLarge: return "FactorTooLarge";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kNonOrientationPreserving: return "NonOrientationPreserving";
    case ErrorCode::kMalformedContainer: return "MalformedContainer";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kInfeasibleBounds: return "InfeasibleBounds";
    case ErrorCode::kTrivialU: return "TrivialU";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> node) {
  std::string text(to_string(code));
  text += ": ";
  text += message;
  if (node) {
    text += " (node " + std::to_string(*node) + ")";
  }
  return text;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> node)
    : std::runtime_error(decorate(code, message, node)), code_(code), node_(node) {}

}  // namespace calderon
