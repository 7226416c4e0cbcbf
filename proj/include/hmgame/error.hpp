#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hmgame {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  DegenerateGame,
  SymbolOutOfRange,
  ZeroProbabilityObservation,
  InvalidInitialModel,
  MissingModel,
  EmptyHistory,
  Parse,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateGame: return "DegenerateGame";
    case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
    case ErrorCode::ZeroProbabilityObservation: return "ZeroProbabilityObservation";
    case ErrorCode::InvalidInitialModel: return "InvalidInitialModel";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Library-wide exception. Every failure the library reports carries a code
/// so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hmgame
