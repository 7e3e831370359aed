#include "walklab/error.hpp"

namespace walklab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMemoryCap: return "MEMORY_CAP";
    case ErrorCode::kRadiusTooSmall: return "RADIUS_TOO_SMALL";
    case ErrorCode::kSizeCap: return "SIZE_CAP";
    case ErrorCode::kEmptySet: return "EMPTY_SET";
    case ErrorCode::kNoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::kRange: return "RANGE";
    case ErrorCode::kDegenerate: return "DEGENERATE";
    case ErrorCode::kOutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::kNotDoubling: return "NOT_DOUBLING";
    case ErrorCode::kHypothesisFail: return "HYPOTHESIS_FAIL";
    case ErrorCode::kInsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::kLeakage: return "LEAKAGE";
    case ErrorCode::kConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::kMissingInput: return "MISSING_INPUT";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kIo: return "IO";
  }
  return "UNKNOWN";
}

}  // namespace walklab
