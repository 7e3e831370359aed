#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace walklab {

enum class ErrorCode {
  kMemoryCap,
  kRadiusTooSmall,
  kSizeCap,
  kEmptySet,
  kNoConvergence,
  kRange,
  kDegenerate,
  kOutOfRange,
  kNotDoubling,
  kHypothesisFail,
  kInsufficientData,
  kLeakage,
  kConfigInvalid,
  kMissingInput,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; the code is the
// machine-readable part, what() carries detail for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace walklab
