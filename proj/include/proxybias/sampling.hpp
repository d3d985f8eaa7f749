#pragma once

// Label-acquisition strategies for estimating the equal-opportunity bias
// when true attributes cost an oracle query each. The engine only sees
// y, y_hat, a_hat and score from the pool; true attributes come from the
// oracle.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "proxybias/audit.hpp"
#include "proxybias/estimators.hpp"
#include "proxybias/oracle.hpp"
#include "proxybias/record.hpp"

namespace proxybias::sampling {

enum class Strategy { Active, Uniform, Positive, Direct };
enum class TraceEstimator { PlugIn, General, Direct };
enum class Termination { Converged, BudgetExhausted, PoolExhausted, MaxIterations };

std::string to_string(Strategy s);
std::string to_string(TraceEstimator e);
std::string to_string(Termination t);

struct TraceStep {
  std::size_t iteration = 0;
  std::size_t labels_used = 0;
  double g1 = 0.0;
  double g2 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::optional<double> r_hat;
  std::optional<double> s_hat;
  /// General inversion with pool-wide alpha_hat, beta_hat.
  Estimate general;
  /// True a on revealed records, a_hat elsewhere.
  Estimate plug_in;
  /// alpha - beta on the revealed records alone.
  Estimate direct;

  const Estimate& headline(TraceEstimator kind) const;
};

struct SamplingTrace {
  std::vector<TraceStep> steps;
  Termination reason = Termination::MaxIterations;
  TraceEstimator headline = TraceEstimator::PlugIn;
};

struct SamplingResult {
  /// Active: the final inversion from the converged (g1, g2, delta1,
  /// delta2); batch strategies: the last step's headline estimate.
  Estimate estimate;
  SamplingTrace trace;
  OracleBudgetState oracle_state;
};

struct ActiveConfig {
  std::size_t batch = 100;   ///< b: candidates drawn per iteration
  std::size_t reveal = 100;  ///< w: most uncertain candidates queried
  double epsilon = 0.01;
  std::size_t max_iters = 200;
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  TraceEstimator headline = TraceEstimator::PlugIn;
  EstimatorOptions options;
};

struct BatchConfig {
  std::size_t batch = 100;
  std::size_t max_iters = 200;
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  TraceEstimator headline = TraceEstimator::PlugIn;
  EstimatorOptions options;
};

/// Uncertainty-driven acquisition. Starts with b uniformly drawn positives
/// (their attributes fix r_hat, s_hat for the whole run and seed the
/// labeled set); each iteration draws b unlabeled positives, queries the w
/// with the smallest |score - 0.5| (ties by id), and re-estimates
/// (g1, g2, delta1, delta2) on everything labeled. Stops when all four move
/// by at most epsilon. A quantity whose conditioning event is still empty
/// keeps its previous value and blocks convergence for that iteration.
/// Throws InvalidArgument on bad config or a positive without score.
SamplingResult active_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                               const ActiveConfig& config);

/// Uniform batches over all records.
SamplingResult uniform_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                                const BatchConfig& config);

/// Uniform batches over y=1 records.
SamplingResult positive_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                                 const BatchConfig& config);

/// alpha - beta on labeled records alone. Throws MissingGroup.
double direct_estimation(std::span<const PredictionRecord> labeled);

/// alpha - beta using the revealed attribute where known, a_hat otherwise.
double plug_in_bias(std::span<const PredictionRecord> pool, const std::unordered_map<std::string, bool>& revealed);

/// First labels_used at which |headline - truth| < tolerance, if ever.
std::optional<std::size_t> labels_to_reach(const SamplingTrace& trace, double truth, double tolerance);

}  // namespace proxybias::sampling
