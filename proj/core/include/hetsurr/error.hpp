#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hetsurr {

enum class ErrorCode {
  MissingColumn,
  NonFiniteValue,
  MixedOutcomePresence,
  EmptyArm,
  InvalidTreatmentCode,
  MalformedCsv,
  IoError,
  MissingPriorOutcome,
  MissingOutcome,
  NonPositiveBandwidth,
  DegenerateSpread,
  OutOfSupport,
  LengthMismatch,
  ZeroSE,
  ZeroDenominator,
  InvalidArgument,
  UnknownSetting,
  NonPositiveDelta0,
  TooManyFailures,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library reports is an Error carrying a machine-readable
// code; the CLI maps codes to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hetsurr
