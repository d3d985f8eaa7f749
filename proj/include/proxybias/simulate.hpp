#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "proxybias/joint_table.hpp"
#include "proxybias/record.hpp"

namespace proxybias::sim {

/// Conditionals on the y=0 slice, which the bias formulas never touch but
/// uniform sampling over all records does.
struct NegativeSlice {
  double a1_fraction = 0.5;  ///< P(a=1 | y=0)
  double alpha = 0.3;        ///< P(y_hat=1 | y=0, a=1)
  double beta = 0.5;         ///< P(y_hat=1 | y=0, a=0)
  double g1 = 0.2;           ///< P(a_hat=1 | y=0, a=0)
  double g2 = 0.3;           ///< P(a_hat=0 | y=0, a=1)
};

struct SimParams {
  double alpha = 0.7;  ///< P(y_hat=1 | y=1, a=1)
  double beta = 0.5;   ///< P(y_hat=1 | y=1, a=0)
  double r = 0.25;     ///< P(y=1, a=1)
  double s = 0.25;     ///< P(y=1, a=0)
  double g1 = 0.2;
  double g2 = 0.3;
  /// Unset mirrors the positive slice: a split r:s, false-positive rates
  /// 1-alpha and 1-beta, and the same attribute error rates.
  std::optional<NegativeSlice> negative;
  /// In [-1, 1]. Within every (y, a) cell the label-error and
  /// attribute-error events get this fraction of their extremal
  /// (Frechet-bound) covariance; 0 gives conditional independence.
  double coupling = 0.0;
  /// Spread of the attribute-score noise; smaller is more informative.
  double score_noise = 0.2;
  std::uint64_t seed = 0;

  NegativeSlice resolved_negative() const;
  /// Throws InvalidParams naming the offending field.
  void validate() const;
};

/// Infinite-sample table with total mass 1.
JointTable exact_table(const SimParams& params);

/// n i.i.d. draws from exact_table(params), ids "s000000", "s000001", ...
/// Every record carries a, a_hat and a score on the a_hat side of 0.5:
/// correct attribute predictions score |N(0, noise)| away from 0 or 1,
/// wrong ones |N(0, noise)| away from 0.5.
std::vector<PredictionRecord> sample_records(const SimParams& params, std::size_t n);

}  // namespace proxybias::sim
