#include "hetsurr/error.hpp"

namespace hetsurr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MixedOutcomePresence: return "MixedOutcomePresence";
    case ErrorCode::EmptyArm: return "EmptyArm";
    case ErrorCode::InvalidTreatmentCode: return "InvalidTreatmentCode";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingPriorOutcome: return "MissingPriorOutcome";
    case ErrorCode::MissingOutcome: return "MissingOutcome";
    case ErrorCode::NonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorCode::DegenerateSpread: return "DegenerateSpread";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroSE: return "ZeroSE";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownSetting: return "UnknownSetting";
    case ErrorCode::NonPositiveDelta0: return "NonPositiveDelta0";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
  }
  return "Unknown";
}

}  // namespace hetsurr
