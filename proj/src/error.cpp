#include "oscimax/error.hpp"

namespace oscimax {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OverlappingBands: return "OverlappingBands";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::InvertedInterval: return "InvertedInterval";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::MissingDirection: return "MissingDirection";
    case ErrorCode::InvalidTime: return "InvalidTime";
    case ErrorCode::TooManyIntervals: return "TooManyIntervals";
    case ErrorCode::NotInSet: return "NotInSet";
    case ErrorCode::SpecOutOfRange: return "SpecOutOfRange";
    case ErrorCode::PhaseCertificateFailed: return "PhaseCertificateFailed";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateAbscissae: return "DegenerateAbscissae";
    case ErrorCode::DegenerateLadder: return "DegenerateLadder";
    case ErrorCode::InvalidExponents: return "InvalidExponents";
  }
  return "Unknown";
}

}  // namespace oscimax
