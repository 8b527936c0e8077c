#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace histent {

enum class ErrorCode {
  EmptySeries,
  NonPositivePrice,
  NonPositiveSigma,
  NonFiniteInput,
  NonPositiveExponent,
  NonPositiveQ,
  WrongBase,
  InvalidMatrix,
  IndefiniteMatrix,
  InternalMajorizationViolation,
  NumericalMismatch,
  MissingColumn,
  UnparseableDate,
  UnparseableValue,
  DuplicateDate,
  EmptyFile,
  EmptyIntersection,
  InsufficientRecords,
  InsufficientOverlap,
  InvalidArgument,
  IoFailure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonPositiveExponent: return "NonPositiveExponent";
    case ErrorCode::NonPositiveQ: return "NonPositiveQ";
    case ErrorCode::WrongBase: return "WrongBase";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::IndefiniteMatrix: return "IndefiniteMatrix";
    case ErrorCode::InternalMajorizationViolation: return "InternalMajorizationViolation";
    case ErrorCode::NumericalMismatch: return "NumericalMismatch";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableDate: return "UnparseableDate";
    case ErrorCode::UnparseableValue: return "UnparseableValue";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::InsufficientRecords: return "InsufficientRecords";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Errors that indicate a numerical failure rather than bad input data.
constexpr bool is_numerical(ErrorCode code) noexcept {
  return code == ErrorCode::IndefiniteMatrix ||
         code == ErrorCode::InternalMajorizationViolation ||
         code == ErrorCode::NumericalMismatch;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace histent
