#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpsguard {

enum class ErrorCode {
  kNonFinite,
  kDimensionMismatch,
  kRankDeficient,
  kHorizonTooShort,
  kNotUndetectable,
  kNoModes,
  kNotSynthesizable,
  kThetaNotFeasible,
  kNotExtensible,
  kInvalidArgument,
  kParseError,
  kAssumptionViolated,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, Python) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cpsguard
