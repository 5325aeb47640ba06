#include "kcenter/error.hpp"

namespace kcenter {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kCapacityExceeded: return "CapacityExceeded";
    case ErrorKind::kSpaceViolation: return "SpaceViolation";
    case ErrorKind::kCommViolation: return "CommViolation";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kEmptySet: return "EmptySet";
    case ErrorKind::kDuplicatePoints: return "DuplicatePoints";
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kSearchFailed: return "SearchFailed";
    case ErrorKind::kSampleFailed: return "SampleFailed";
    case ErrorKind::kHubNotInSet: return "HubNotInSet";
    case ErrorKind::kAllRepetitionsFailed: return "AllRepetitionsFailed";
    case ErrorKind::kNoFeasibleRadius: return "NoFeasibleRadius";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kInfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorKind::kValidation: return "Validation";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message, const std::string& stage) {
  std::string out = to_string(kind);
  if (!stage.empty()) out += " [" + stage + "]";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string stage)
    : std::runtime_error(compose(kind, message, stage)),
      kind_(kind),
      message_(message),
      stage_(std::move(stage)) {}

Error Error::with_stage(const std::string& stage) const {
  if (stage_.empty()) return Error(kind_, message_, stage);
  return Error(kind_, message_, stage + "/" + stage_);
}

}  // namespace kcenter
