#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ndlab {

enum class ErrorCode {
  EmptyInterior,
  InvalidShape,
  AsymmetricInput,
  InvalidCoefficient,
  BlendFailure,
  SupportOverrun,
  SyntaxError,
  UnknownIdentifier,
  DimensionMismatch,
  SolverDivergence,
  SingularSystem,
  NearSingular,
  StepRejection,
  NotMonotone,
  DisconnectedDomain,
  ConfigError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure inside a coefficient expression. `column` is 1-based.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int column, const std::string& what)
      : Error(code, "column " + std::to_string(column) + ": " + what), column_(column) {}

  int column() const noexcept { return column_; }

 private:
  int column_;
};

}  // namespace ndlab
