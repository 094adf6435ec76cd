#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oscimax {

enum class ErrorCode {
  OverlappingBands,
  EmptyProfile,
  InvertedInterval,
  InvalidProfile,
  InvalidRequest,
  ToleranceNotReached,
  MissingDirection,
  InvalidTime,
  TooManyIntervals,
  NotInSet,
  SpecOutOfRange,
  PhaseCertificateFailed,
  InvalidParams,
  DegenerateAbscissae,
  DegenerateLadder,
  InvalidExponents,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every validation and numeric-budget failure in the library surfaces as an
/// Error carrying one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Budget exhaustion is the only numeric failure; all other codes are input validation.
  bool is_budget_error() const noexcept { return code_ == ErrorCode::ToleranceNotReached; }

 private:
  ErrorCode code_;
};

}  // namespace oscimax
