#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxybias/error.hpp"
#include "proxybias/estimators.hpp"
#include "proxybias/record.hpp"

namespace proxybias {

/// A scalar that is either a finite value or absent with a reason.
struct Estimate {
  std::optional<double> value;
  std::optional<ErrorCode> reason;
  std::string detail;
  bool clamped = false;

  static Estimate of(double v, bool clamped = false) { return Estimate{v, std::nullopt, {}, clamped}; }
  static Estimate missing(ErrorCode code, std::string why) { return Estimate{std::nullopt, code, std::move(why), false}; }
  static Estimate not_requested() { return Estimate{}; }

  bool has_value() const noexcept { return value.has_value(); }
  bool degenerate() const noexcept { return reason.has_value(); }
};

struct BiasReport {
  Estimate true_bias_signed;
  Estimate naive_signed;
  Estimate gamma;
  Estimate corrected_abs;
  Estimate general_signed;
  Estimate direct_signed;
  Estimate plug_in_signed;
  std::optional<ErrorProfile> error_profile;
  std::optional<ConditionalErrors> conditional_errors;
  std::optional<Deltas> deltas;
  std::optional<Rates> rates;
  std::optional<double> ci_violation;
  std::size_t n_evaluation = 0;
  std::size_t n_labeled = 0;
};

enum class EstimatorSet : unsigned {
  Naive = 1u << 0,
  Corrected = 1u << 1,
  General = 1u << 2,
  Direct = 1u << 3,
  All = 0xFu,
};

constexpr bool includes(EstimatorSet set, EstimatorSet which) noexcept {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(which)) != 0;
}

struct AuditInputs {
  /// Records the bias is measured on; a_hat required, a optional (enables
  /// the true bias).
  std::span<const PredictionRecord> evaluation;
  /// Small labeled sample with both a and a_hat.
  std::span<const PredictionRecord> common;
  /// Optional pool for the plug-in estimate: a where present, a_hat otherwise.
  std::span<const PredictionRecord> plug_in_pool;
  EstimatorSet estimators = EstimatorSet::All;
  EstimatorOptions options;
};

/// Plug-in signed bias: true attribute where the record carries one, the
/// predicted attribute elsewhere. Throws EmptyPredictedGroup when a group
/// ends up empty, MissingField when a record has neither attribute.
double plug_in_bias(std::span<const PredictionRecord> pool);

/// Runs every requested estimator. Individual failures land in the
/// corresponding Estimate; nothing here throws for degenerate inputs.
BiasReport audit(const AuditInputs& inputs);

}  // namespace proxybias
