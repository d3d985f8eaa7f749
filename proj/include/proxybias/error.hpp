#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace proxybias {

enum class ErrorCode {
  MissingField,
  EmptyInput,
  MissingGroup,
  EmptyPredictedGroup,
  MissingConditioningEvent,
  ZeroDenominator,
  UninvertibleDistortion,
  DegenerateDeltas,
  MissingAxis,
  InfeasibleBudget,
  BayesOptimalInput,
  InvalidParams,
  PoolExhausted,
  ParseError,
  SchemaError,
  InfeasibleSplit,
  OracleFailure,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code; the
// message holds the human detail (offending id, line number, event name).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace proxybias
