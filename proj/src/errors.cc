#include "whf/errors.h"

namespace whf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnstableStateMatrix: return "UnstableStateMatrix";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::kNotIsometric: return "NotIsometric";
    case ErrorCode::kSingularResolvent: return "SingularResolvent";
    case ErrorCode::kSpectralRadiusViolation: return "SpectralRadiusViolation";
    case ErrorCode::kSpectraNotDisjoint: return "SpectraNotDisjoint";
    case ErrorCode::kNotStabilizable: return "NotStabilizable";
    case ErrorCode::kIndefiniteSchurComplement:
      return "IndefiniteSchurComplement";
    case ErrorCode::kUnitarityCheckFailed: return "UnitarityCheckFailed";
    case ErrorCode::kNonInvertibleP0: return "NonInvertibleP0";
    case ErrorCode::kPhaseStepTooLarge: return "PhaseStepTooLarge";
    case ErrorCode::kGrowthExhausted: return "GrowthExhausted";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kUnstableStateMatrix:
      return true;
    default:
      return false;
  }
}

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::string& stage) {
  std::string out;
  if (!stage.empty()) out += "[" + stage + "] ";
  out += std::string(to_string(code));
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string stage)
    : std::runtime_error(compose(code, message, stage)),
      code_(code),
      stage_(std::move(stage)),
      detail_(message) {}

Error Error::with_stage(std::string stage) const {
  return Error(code_, detail_, std::move(stage));
}

}  // namespace whf
