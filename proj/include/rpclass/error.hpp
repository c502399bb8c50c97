#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpclass {

enum class ErrorCode {
  InvalidDims,
  InvalidSparsity,
  InvalidArgument,
  DimMismatch,
  DuplicatePoints,
  MissingClass,
  InsufficientData,
  SingularCovariance,
  SingularSketch,
  InvalidK,
  FoldDegenerate,
  DegenerateSeparation,
  UntrainableEnsemble,
  ParseError,
  LabelError,
  NonFinite,
  NetworkError,
  ChecksumMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Fit failures that the harness records as "intractable" instead of aborting.
inline bool is_fit_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingClass:
    case ErrorCode::InsufficientData:
    case ErrorCode::SingularCovariance:
    case ErrorCode::SingularSketch:
    case ErrorCode::InvalidK:
    case ErrorCode::FoldDegenerate:
    case ErrorCode::UntrainableEnsemble:
      return true;
    default:
      return false;
  }
}

}  // namespace rpclass
