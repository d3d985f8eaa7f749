#pragma once

// Closed-form equal-opportunity estimators over a JointTable.
//
// Notation: alpha = P(y_hat=1 | y=1, a=1), beta = P(y_hat=1 | y=1, a=0), and
// the "naive" versions alpha_hat, beta_hat condition on the predicted
// attribute instead. All bias values are signed (alpha - beta); callers take
// the absolute value when they need the magnitude.

#include "proxybias/joint_table.hpp"

namespace proxybias {

/// Joint base rates of the positive label: r = P(y=1, a=1), s = P(y=1, a=0).
struct Rates {
  double r = 0.0;
  double s = 0.0;

  bool missing_group() const noexcept { return !(r > 0.0) || !(s > 0.0); }
};

struct ConditionalErrors {
  double g1 = 0.0;  ///< P(a_hat != a | a=0, y=1)
  double g2 = 0.0;  ///< P(a_hat != a | a=1, y=1)
};

struct Deltas {
  double delta1 = 0.0;  ///< P(a_hat=1 | y_hat=1, a=0, y=1)
  double delta2 = 0.0;  ///< P(a_hat=0 | y_hat=1, a=1, y=1)
};

struct ErrorProfile {
  double g1 = 0.0;
  double g2 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  ConditionalErrors conditional_errors() const noexcept { return {g1, g2}; }
  Deltas deltas() const noexcept { return {delta1, delta2}; }
};

/// Group-wise true-positive rates, either true (alpha, beta) or as seen
/// through the attribute classifier (alpha_hat, beta_hat).
struct GroupRates {
  double group1 = 0.0;  ///< a=1 (or a_hat=1)
  double group0 = 0.0;  ///< a=0 (or a_hat=0)

  double gap() const noexcept { return group1 - group0; }
};

struct EstimatorOptions {
  /// Additive pseudo-count for the conditional error rates and deltas.
  double pseudo_count = 0.0;
};

/// Below this, the distortion factor and 1 - delta1 - delta2 count as zero.
inline constexpr double kDegenerateThreshold = 1e-6;

/// Requires the true attribute axis. Groups with zero mass are reported via
/// Rates::missing_group(), not thrown.
Rates rates(const JointTable& table);

/// (alpha, beta). Throws MissingGroup if either (y=1, a) group is empty.
GroupRates true_rates(const JointTable& table);
double true_bias(const JointTable& table);

/// (alpha_hat, beta_hat). Throws EmptyPredictedGroup if either
/// (y=1, a_hat) group is empty.
GroupRates naive_rates(const JointTable& table);
double naive_bias(const JointTable& table);

/// Needs both attribute axes. Throws MissingGroup.
ConditionalErrors conditional_errors(const JointTable& table, const EstimatorOptions& options = {});

/// Needs both attribute axes. Throws MissingConditioningEvent naming the
/// empty (y_hat=1, a, y=1) event.
Deltas deltas(const JointTable& table, const EstimatorOptions& options = {});

ErrorProfile error_profile(const JointTable& table, const EstimatorOptions& options = {});

/// gamma = |1-g1-g2| / ((s/r (1-g1) + g2) (r/s (1-g2) + g1)), always in [0,1].
/// Throws MissingGroup (r or s zero), InvalidArgument (rates out of
/// [0,1]) or ZeroDenominator (g1=1, g2=0 or g1=0, g2=1 boundary).
double distortion_factor(double g1, double g2, const Rates& rates);

/// Image of (alpha, beta) under the attribute classifier when y_hat and a_hat
/// are conditionally independent given (y, a).
/// Throws ZeroDenominator naming the vanishing denominator.
GroupRates forward_noisy_estimates(double alpha, double beta, const Rates& rates, double g1, double g2);

struct CorrectedBias {
  double value = 0.0;
  bool clamped = false;
};

/// |alpha - beta| estimate naive_abs / gamma, clamped to [0,1].
/// Throws UninvertibleDistortion when gamma <= kDegenerateThreshold.
CorrectedBias corrected_bias(double naive_abs, double gamma);

/// Signed alpha - beta recovered from (alpha_hat, beta_hat) without any
/// independence assumption. Throws DegenerateDeltas when
/// |1 - delta1 - delta2| <= kDegenerateThreshold and MissingGroup when r or s
/// is zero.
double general_corrected_bias(double alpha_hat, double beta_hat, const ErrorProfile& profile,
                              const Rates& rates);

/// Largest |P(y_hat, a_hat | y, a) - P(y_hat | y, a) P(a_hat | y, a)| over all
/// (y, a) cells with mass. Zero exactly when y_hat and a_hat are
/// conditionally independent. Needs both attribute axes.
double ci_violation(const JointTable& table);

}  // namespace proxybias
