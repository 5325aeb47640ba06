#pragma once

#include <stdexcept>
#include <string>

namespace kcenter {

enum class ErrorKind {
  kCapacityExceeded,
  kSpaceViolation,
  kCommViolation,
  kDimensionMismatch,
  kEmptySet,
  kDuplicatePoints,
  kInvalidParams,
  kSearchFailed,
  kSampleFailed,
  kHubNotInSet,
  kAllRepetitionsFailed,
  kNoFeasibleRadius,
  kTooLarge,
  kInfeasibleGeometry,
  kValidation,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `stage()` names the pipeline stage
/// (e.g. "phase1.1.iter2") when the error escaped from a refinement run.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string stage = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& message() const noexcept { return message_; }

  /// Copy of this error tagged with `stage`; an existing tag is kept as a suffix.
  Error with_stage(const std::string& stage) const;

 private:
  ErrorKind kind_;
  std::string message_;
  std::string stage_;
};

}  // namespace kcenter
