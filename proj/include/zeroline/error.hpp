#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zeroline {

/// Every failure the library reports carries one of these codes.
enum class ErrorCode {
  kNotFound,
  kMalformedHeader,
  kUnsupportedMaxval,
  kTruncatedRaster,
  kIoFailure,
  kOutOfBounds,
  kInvalidArgument,
  kImageTooSmall,
  kSingularHomography,
  kPointAtInfinity,
  kDegenerateConfiguration,
  kNumericalFailure,
  kTooFewMatches,
  kNoConsensus,
  kKeypointTooCloseToBorder,
  kNoCandidateRegion,
  kSegmentationFailure,
  kSchemaViolation,
  kFrameMismatch,
  kEmptyGroup,
  kNonPositiveDistance,
  kNoGroundTruth,
  kEmptyDataset,
  kSizeTooSmall,
  kInvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kUnsupportedMaxval: return "unsupported-maxval";
    case ErrorCode::kTruncatedRaster: return "truncated-raster";
    case ErrorCode::kIoFailure: return "io-failure";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kImageTooSmall: return "image-too-small";
    case ErrorCode::kSingularHomography: return "singular-homography";
    case ErrorCode::kPointAtInfinity: return "point-at-infinity";
    case ErrorCode::kDegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::kNumericalFailure: return "numerical-failure";
    case ErrorCode::kTooFewMatches: return "too-few-matches";
    case ErrorCode::kNoConsensus: return "no-consensus";
    case ErrorCode::kKeypointTooCloseToBorder: return "keypoint-too-close-to-border";
    case ErrorCode::kNoCandidateRegion: return "no-candidate-region";
    case ErrorCode::kSegmentationFailure: return "segmentation-failure";
    case ErrorCode::kSchemaViolation: return "schema-violation";
    case ErrorCode::kFrameMismatch: return "frame-mismatch";
    case ErrorCode::kEmptyGroup: return "empty-group";
    case ErrorCode::kNonPositiveDistance: return "non-positive-distance";
    case ErrorCode::kNoGroundTruth: return "no-ground-truth";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kSizeTooSmall: return "size-too-small";
    case ErrorCode::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zeroline
