#include "cpsguard/errors.hpp"

namespace cpsguard {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kHorizonTooShort: return "HorizonTooShort";
    case ErrorCode::kNotUndetectable: return "NotUndetectable";
    case ErrorCode::kNoModes: return "NoModes";
    case ErrorCode::kNotSynthesizable: return "NotSynthesizable";
    case ErrorCode::kThetaNotFeasible: return "ThetaNotFeasible";
    case ErrorCode::kNotExtensible: return "NotExtensible";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kAssumptionViolated: return "AssumptionViolated";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace cpsguard
