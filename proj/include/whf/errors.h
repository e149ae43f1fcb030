#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace whf {

enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kShapeMismatch,
  kUnstableStateMatrix,
  kNotHermitian,
  kNotPositiveSemidefinite,
  kNotIsometric,
  kSingularResolvent,
  kSpectralRadiusViolation,
  kSpectraNotDisjoint,
  kNotStabilizable,
  kIndefiniteSchurComplement,
  kUnitarityCheckFailed,
  kNonInvertibleP0,
  kPhaseStepTooLarge,
  kGrowthExhausted,
};

std::string_view to_string(ErrorCode code);

/// True for errors caused by the input itself (bad shapes, unstable state
/// matrices, unparsable files) as opposed to numerical breakdown.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {});

  ErrorCode code() const { return code_; }
  const std::string& stage() const { return stage_; }
  const std::string& detail() const { return detail_; }

  /// Returns a copy tagged with the pipeline stage that raised it.
  Error with_stage(std::string stage) const;

 private:
  ErrorCode code_;
  std::string stage_;
  std::string detail_;
};

}  // namespace whf
