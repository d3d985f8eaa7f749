#include "proxybias/error.hpp"

namespace proxybias {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::EmptyPredictedGroup: return "EmptyPredictedGroup";
    case ErrorCode::MissingConditioningEvent: return "MissingConditioningEvent";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::UninvertibleDistortion: return "UninvertibleDistortion";
    case ErrorCode::DegenerateDeltas: return "DegenerateDeltas";
    case ErrorCode::MissingAxis: return "MissingAxis";
    case ErrorCode::InfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::BayesOptimalInput: return "BayesOptimalInput";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InfeasibleSplit: return "InfeasibleSplit";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace proxybias
