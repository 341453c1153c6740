#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cantor {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  NoRootInInterval,
  MultipleRootsInInterval,
  DegenerateInterval,
  FieldMismatch,
  ReducibleMinpoly,
  NotADescendant,
  PrefixViolation,
  IncompletenessGap,
  RowSumMismatch,
  PartSumMismatch,
  UnknownItem,
  SumMismatch,
  NotSelmerField,
  FinalMultisetMismatch,
  NonTreeMoveInA,
  WindowTooSmall,
  FuelExhausted,
  StrategyInapplicable,
  NotFoundWithinBounds,
  DepthTooLarge,
  CoefficientOutOfRange,
  RefinementFailed,
  MeasureMismatch,
  InvalidCertificate,
};

std::string_view error_name(ErrorCode code);

/// All library failures carry one of the named codes above; the CLI reports
/// the name verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NoRootInInterval: return "NoRootInInterval";
    case ErrorCode::MultipleRootsInInterval: return "MultipleRootsInInterval";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::ReducibleMinpoly: return "ReducibleMinpoly";
    case ErrorCode::NotADescendant: return "NotADescendant";
    case ErrorCode::PrefixViolation: return "PrefixViolation";
    case ErrorCode::IncompletenessGap: return "IncompletenessGap";
    case ErrorCode::RowSumMismatch: return "RowSumMismatch";
    case ErrorCode::PartSumMismatch: return "PartSumMismatch";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::SumMismatch: return "SumMismatch";
    case ErrorCode::NotSelmerField: return "NotSelmerField";
    case ErrorCode::FinalMultisetMismatch: return "FinalMultisetMismatch";
    case ErrorCode::NonTreeMoveInA: return "NonTreeMoveInA";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::StrategyInapplicable: return "StrategyInapplicable";
    case ErrorCode::NotFoundWithinBounds: return "NotFoundWithinBounds";
    case ErrorCode::DepthTooLarge: return "DepthTooLarge";
    case ErrorCode::CoefficientOutOfRange: return "CoefficientOutOfRange";
    case ErrorCode::RefinementFailed: return "RefinementFailed";
    case ErrorCode::MeasureMismatch: return "MeasureMismatch";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
  }
  return "Unknown";
}

}  // namespace cantor
