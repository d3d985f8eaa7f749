#include "proxybias/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "kernels/distortion_point.hpp"
#include "proxybias/error.hpp"

namespace proxybias {

namespace {

void require_both_axes(const JointTable& table, const char* what) {
  if (table.axes() != AttributeSource::Both) {
    throw Error(ErrorCode::MissingAxis, std::string(what) + " needs true and predicted attributes");
  }
}

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0,1]");
  }
}

}  // namespace

Rates rates(const JointTable& table) {
  if (!table.has_true_attribute()) throw Error(ErrorCode::MissingAxis, "rates need the true attribute");
  return Rates{table.probability({.y = true, .a = true}), table.probability({.y = true, .a = false})};
}

GroupRates true_rates(const JointTable& table) {
  const Event pos1{.y = true, .a = true};
  const Event pos0{.y = true, .a = false};
  if (!(table.mass(pos1) > 0.0)) throw Error(ErrorCode::MissingGroup, "no mass on y=1,a=1");
  if (!(table.mass(pos0) > 0.0)) throw Error(ErrorCode::MissingGroup, "no mass on y=1,a=0");
  return GroupRates{table.conditional({.y_hat = true}, pos1), table.conditional({.y_hat = true}, pos0)};
}

double true_bias(const JointTable& table) { return true_rates(table).gap(); }

GroupRates naive_rates(const JointTable& table) {
  const Event pos1{.y = true, .a_hat = true};
  const Event pos0{.y = true, .a_hat = false};
  if (!(table.mass(pos1) > 0.0)) throw Error(ErrorCode::EmptyPredictedGroup, "no mass on y=1,a_hat=1");
  if (!(table.mass(pos0) > 0.0)) throw Error(ErrorCode::EmptyPredictedGroup, "no mass on y=1,a_hat=0");
  return GroupRates{table.conditional({.y_hat = true}, pos1), table.conditional({.y_hat = true}, pos0)};
}

double naive_bias(const JointTable& table) { return naive_rates(table).gap(); }

ConditionalErrors conditional_errors(const JointTable& table, const EstimatorOptions& options) {
  require_both_axes(table, "conditional_errors");
  const Event group0{.y = true, .a = false};
  const Event group1{.y = true, .a = true};
  if (!(table.mass(group0) > 0.0)) throw Error(ErrorCode::MissingGroup, "no mass on y=1,a=0");
  if (!(table.mass(group1) > 0.0)) throw Error(ErrorCode::MissingGroup, "no mass on y=1,a=1");
  return ConditionalErrors{table.conditional({.a_hat = true}, group0, options.pseudo_count),
                           table.conditional({.a_hat = false}, group1, options.pseudo_count)};
}

Deltas deltas(const JointTable& table, const EstimatorOptions& options) {
  require_both_axes(table, "deltas");
  const Event given0{.y = true, .a = false, .y_hat = true};
  const Event given1{.y = true, .a = true, .y_hat = true};
  const bool smoothed = options.pseudo_count > 0.0;
  if (!smoothed && !(table.mass(given0) > 0.0)) {
    throw Error(ErrorCode::MissingConditioningEvent, "no mass on " + given0.describe());
  }
  if (!smoothed && !(table.mass(given1) > 0.0)) {
    throw Error(ErrorCode::MissingConditioningEvent, "no mass on " + given1.describe());
  }
  return Deltas{table.conditional({.a_hat = true}, given0, options.pseudo_count),
                table.conditional({.a_hat = false}, given1, options.pseudo_count)};
}

ErrorProfile error_profile(const JointTable& table, const EstimatorOptions& options) {
  const ConditionalErrors g = conditional_errors(table, options);
  const Deltas d = deltas(table, options);
  return ErrorProfile{g.g1, g.g2, d.delta1, d.delta2};
}

double distortion_factor(double g1, double g2, const Rates& rates) {
  require_probability(g1, "g1");
  require_probability(g2, "g2");
  require_probability(rates.r, "r");
  require_probability(rates.s, "s");
  if (rates.missing_group()) throw Error(ErrorCode::MissingGroup, "r and s must both be positive");
  const double s_over_r = rates.s / rates.r;
  const double r_over_s = rates.r / rates.s;
  if (s_over_r * (1.0 - g1) + g2 == 0.0 || r_over_s * (1.0 - g2) + g1 == 0.0) {
    throw Error(ErrorCode::ZeroDenominator, "distortion factor denominator vanishes at g1=" +
                                                std::to_string(g1) + ", g2=" + std::to_string(g2));
  }
  return kernels::detail::distortion_point(g1, g2, s_over_r, r_over_s);
}

GroupRates forward_noisy_estimates(double alpha, double beta, const Rates& rates, double g1, double g2) {
  require_probability(alpha, "alpha");
  require_probability(beta, "beta");
  require_probability(g1, "g1");
  require_probability(g2, "g2");
  const double r = rates.r;
  const double s = rates.s;
  const double denom1 = r * (1.0 - g2) + s * g1;
  const double denom0 = r * g2 + s * (1.0 - g1);
  if (!(denom1 > 0.0)) throw Error(ErrorCode::ZeroDenominator, "P(y=1, a_hat=1) is zero");
  if (!(denom0 > 0.0)) throw Error(ErrorCode::ZeroDenominator, "P(y=1, a_hat=0) is zero");
  return GroupRates{(alpha * r * (1.0 - g2) + beta * s * g1) / denom1,
                    (alpha * r * g2 + beta * s * (1.0 - g1)) / denom0};
}

CorrectedBias corrected_bias(double naive_abs, double gamma) {
  if (!(naive_abs >= 0.0)) throw Error(ErrorCode::InvalidArgument, "naive_abs must be >= 0");
  if (!(gamma > kDegenerateThreshold)) {
    throw Error(ErrorCode::UninvertibleDistortion, "gamma=" + std::to_string(gamma) + " is too small to invert");
  }
  const double raw = naive_abs / gamma;
  if (raw > 1.0) return CorrectedBias{1.0, true};
  return CorrectedBias{raw, false};
}

double general_corrected_bias(double alpha_hat, double beta_hat, const ErrorProfile& p, const Rates& rates) {
  if (rates.missing_group()) throw Error(ErrorCode::MissingGroup, "r and s must both be positive");
  const double pivot = 1.0 - p.delta1 - p.delta2;
  if (!(std::fabs(pivot) > kDegenerateThreshold)) {
    throw Error(ErrorCode::DegenerateDeltas, "1 - delta1 - delta2 = " + std::to_string(pivot));
  }
  const double s_over_r = rates.s / rates.r;
  const double r_over_s = rates.r / rates.s;
  const double lhs = alpha_hat * (s_over_r * p.g1 + 1.0 - p.g2) * (1.0 - p.delta1 + r_over_s * p.delta2);
  const double rhs = beta_hat * (1.0 - p.g1 + r_over_s * p.g2) * (1.0 + s_over_r * p.delta1 - p.delta2);
  return (lhs - rhs) / pivot;
}

double ci_violation(const JointTable& table) {
  require_both_axes(table, "ci_violation");
  double worst = 0.0;
  for (const bool y : {false, true}) {
    for (const bool a : {false, true}) {
      const double cell_mass = table.mass({.y = y, .a = a});
      if (!(cell_mass > 0.0)) continue;
      for (const bool y_hat : {false, true}) {
        const double p_y_hat = table.mass({.y = y, .a = a, .y_hat = y_hat}) / cell_mass;
        for (const bool a_hat : {false, true}) {
          const double p_a_hat = table.mass({.y = y, .a = a, .a_hat = a_hat}) / cell_mass;
          const double p_joint = table.cell(y, a, y_hat, a_hat) / cell_mass;
          worst = std::max(worst, std::fabs(p_joint - p_y_hat * p_a_hat));
        }
      }
    }
  }
  return worst;
}

}  // namespace proxybias
