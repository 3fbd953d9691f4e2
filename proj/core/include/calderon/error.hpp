#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace calderon {

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDefinite,
  kAsymmetric,
  kDegenerateDeterminant,
  kDimensionTooSmall,
  kUnsupportedDimension,
  kBoundaryLayerRequested,
  kSingularInteriorBlock,
  kNoConvergence,
  kShapeMismatch,
  kNonPositiveFactor,
  kMissingAnalyticGradient,
  kFactorTooLarge,
  kInsufficientSamples,
  kNonOrientationPreserving,
  kMalformedContainer,
  kGridMismatch,
  kInfeasibleBounds,
  kTrivialU,
  kConfigInvalid,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable code and, when relevant, the
/// offending grid node.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> node = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> node() const noexcept { return node_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> node_;
};

}  // namespace calderon
