#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "proxybias/joint_table.hpp"
#include "proxybias/record.hpp"

namespace proxybias::theory {

/// Error mass U = P(h(x) != a, y=1) with equal base rates r = s.
struct ErrorBudget {
  double U = 0.0;
  double r = 0.0;
};

struct ErrorSplit {
  double g1 = 0.0;
  double g2 = 0.0;

  bool operator==(const ErrorSplit&) const = default;
};

struct ScanConfig {
  double r = 0.0;
  double s = 0.0;
  double U = 0.0;
  double step = 1e-3;
};

struct ScanPoint {
  double g1 = 0.0;
  double g2 = 0.0;
  double gamma = 0.0;
};

/// gamma along the budget line s*g1 + r*g2 = U, sampled on a g1 grid that
/// always includes both ends of the feasible interval.
struct GammaScan {
  ScanConfig config;
  double g1_min = 0.0;
  double g1_max = 0.0;
  std::vector<ScanPoint> points;
  /// Indices of grid points within kArgmaxTolerance of the maximum.
  std::vector<std::size_t> argmax;
  double max_gamma = 0.0;

  static constexpr double kArgmaxTolerance = 1e-12;
};

/// Throws InvalidArgument for r, s outside (0,1], r + s > 1, U < 0 or
/// step <= 0, and InfeasibleBudget when no (g1, g2) in [0,1]^2 meets the
/// budget.
GammaScan gamma_scan(const ScanConfig& config);
GammaScan gamma_scan(const ErrorBudget& budget, double step = 1e-3);

/// Global maximizers of gamma under an error budget when r = s:
/// {(0, U/r), (U/r, 0)} for U <= r and {(U/r - 1, 1), (1, U/r - 1)} for
/// U >= r. At U = r both branches coincide; U = 0 gives {(0, 0)}.
/// Throws InfeasibleBudget for U > 2r.
std::vector<ErrorSplit> optimal_error_split(const ErrorBudget& budget);

/// One row of the six-point distribution on which the Bayes-optimal
/// attribute classifier yields naive bias 1 although the true bias is 0.
/// The label classifier is f = x2; every row carries mass 1/6.
struct CounterexampleRow {
  bool x1, x2, a, y, a_hat;
};

std::array<CounterexampleRow, 6> bayes_counterexample_rows();
std::vector<PredictionRecord> bayes_counterexample_records();
/// Table with integer mass 1 per row (total 6), so every ratio is exact.
JointTable bayes_counterexample();

/// Point mass of a discrete (x, y) distribution; x indexes the labeling.
struct XYAtom {
  std::size_t x = 0;
  bool y = false;
  double mass = 0.0;
};

struct XYAAtom {
  std::size_t x = 0;
  bool y = false;
  bool a = false;
  double mass = 0.0;
};

/// Two distributions that agree on (x, y), so any learner and any fixed
/// attribute classifier see the same thing, yet the label classifier has
/// bias 0 under q1 and bias 1 under q2.
struct IndistinguishablePair {
  std::vector<XYAAtom> q1;
  std::vector<XYAAtom> q2;
  /// Seeded fixed attribute classifier h(x).
  std::vector<bool> attribute_classifier;
  /// Tables over (y, a, y_hat = f(x), a_hat = h(x)).
  JointTable table1;
  JointTable table2;
  /// max_x |Q1(x, a=1) - Q2(x, a=1)|; zero whenever every x with y=1 mass
  /// carries at least half as much y=0 mass to rebalance a.
  double xa_marginal_gap = 0.0;
};

/// `labeling[x]` is f(x). Throws BayesOptimalInput when {f=1, y=1} or
/// {f=0, y=1} has no mass and InvalidArgument for bad atoms.
IndistinguishablePair indistinguishable_pair(std::span<const XYAtom> base, const std::vector<bool>& labeling,
                                             std::uint64_t seed);

}  // namespace proxybias::theory
