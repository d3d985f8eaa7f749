#include "proxybias/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "proxybias/error.hpp"
#include "proxybias/kernels.hpp"

namespace proxybias::sampling {

namespace {

enum class Frame { All, Positive };

// Attribute-free view of the pool plus whatever the oracle has disclosed.
class LabelState {
 public:
  LabelState(std::span<const PredictionRecord> pool, EstimatorOptions options)
      : pool_(pool), options_(options), revealed_(pool.size()) {
    if (pool.empty()) throw Error(ErrorCode::EmptyInput, "empty pool");
    codes_.reserve(pool.size());
    std::size_t positives = 0;
    for (const auto& rec : pool) {
      if (!rec.a_hat) throw Error(ErrorCode::MissingField, "record '" + rec.id + "' has no a_hat");
      codes_.push_back(cell_index(rec.y, false, rec.y_hat, *rec.a_hat));
      positives += rec.y ? 1 : 0;
    }
    positive_share_ = static_cast<double>(positives) / static_cast<double>(pool.size());
    try {
      noisy_ = naive_rates(JointTable(counts_to_cells(kernels::tally_cells(codes_)), AttributeSource::PredictedA));
    } catch (const Error& e) {
      noisy_failure_ = Estimate::missing(e.code(), e.what());
    }
  }

  const PredictionRecord& record(std::size_t i) const { return pool_[i]; }
  std::size_t size() const { return pool_.size(); }
  bool is_revealed(std::size_t i) const { return revealed_[i].has_value(); }

  void reveal(OracleSession& session, const std::vector<std::size_t>& indices) {
    std::vector<std::string> ids;
    ids.reserve(indices.size());
    for (const std::size_t i : indices) ids.push_back(pool_[i].id);
    const std::vector<bool> answers = session.reveal(ids);
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const std::size_t i = indices[k];
      const auto& rec = pool_[i];
      const bool a = answers[k];
      revealed_[i] = a;
      codes_[i] = cell_index(rec.y, false, rec.y_hat, a);
      labeled_[cell_index(rec.y, a, rec.y_hat, *rec.a_hat)] += 1.0;
      labeled_count_ += 1;
    }
  }

  std::size_t labeled_count() const { return labeled_count_; }

  // Conditional over labeled records; nullopt when the event is empty.
  std::optional<double> labeled_conditional(const Event& event, const Event& given) const {
    double joint = 0.0;
    double base = 0.0;
    for (std::size_t c = 0; c < kCellCount; ++c) {
      if (given.contains(c)) {
        base += labeled_[c];
        if (event.contains(c)) joint += labeled_[c];
      }
    }
    if (!(base > 0.0)) return std::nullopt;
    return (joint + options_.pseudo_count) / (base + 2.0 * options_.pseudo_count);
  }

  // Base rates from revealed positives scaled by the pool's P(y=1).
  std::optional<Rates> positive_rates() const {
    const auto frac_a1 = labeled_conditional({.a = true}, {.y = true});
    if (!frac_a1) return std::nullopt;
    // Raw fraction, never smoothed.
    const double n1 = mass({.y = true, .a = true});
    const double n0 = mass({.y = true, .a = false});
    return Rates{positive_share_ * n1 / (n1 + n0), positive_share_ * n0 / (n1 + n0)};
  }

  // Base rates as joint frequencies among all revealed records.
  std::optional<Rates> labeled_rates() const {
    if (labeled_count_ == 0) return std::nullopt;
    const double n = static_cast<double>(labeled_count_);
    return Rates{mass({.y = true, .a = true}) / n, mass({.y = true, .a = false}) / n};
  }

  Estimate general(const ErrorProfile& profile, const std::optional<Rates>& rates) const {
    if (!noisy_) return noisy_failure_;
    if (!rates) return Estimate::missing(ErrorCode::MissingGroup, "no revealed positives yet");
    try {
      return Estimate::of(general_corrected_bias(noisy_->group1, noisy_->group0, profile, *rates));
    } catch (const Error& e) {
      return Estimate::missing(e.code(), e.what());
    }
  }

  Estimate plug_in() const {
    try {
      return Estimate::of(naive_bias(JointTable(counts_to_cells(kernels::tally_cells(codes_)),
                                                AttributeSource::PredictedA)));
    } catch (const Error& e) {
      return Estimate::missing(e.code(), e.what());
    }
  }

  Estimate direct() const {
    const auto alpha = labeled_conditional({.y_hat = true}, {.y = true, .a = true});
    const auto beta = labeled_conditional({.y_hat = true}, {.y = true, .a = false});
    if (!alpha || !beta) return Estimate::missing(ErrorCode::MissingGroup, "a (y=1, a) group has no revealed records");
    // Direct estimate is never smoothed.
    const double n11 = mass({.y = true, .a = true, .y_hat = true});
    const double n1 = mass({.y = true, .a = true});
    const double n01 = mass({.y = true, .a = false, .y_hat = true});
    const double n0 = mass({.y = true, .a = false});
    return Estimate::of(n11 / n1 - n01 / n0);
  }

 private:
  static JointTable::Cells counts_to_cells(const kernels::CellCounts& counts) {
    JointTable::Cells cells{};
    for (std::size_t i = 0; i < kCellCount; ++i) cells[i] = static_cast<double>(counts[i]);
    return cells;
  }

  double mass(const Event& event) const {
    double m = 0.0;
    for (std::size_t c = 0; c < kCellCount; ++c) {
      if (event.contains(c)) m += labeled_[c];
    }
    return m;
  }

  std::span<const PredictionRecord> pool_;
  EstimatorOptions options_;
  std::vector<std::optional<bool>> revealed_;
  std::vector<std::uint8_t> codes_;
  JointTable::Cells labeled_{};
  std::size_t labeled_count_ = 0;
  double positive_share_ = 0.0;
  std::optional<GroupRates> noisy_;
  Estimate noisy_failure_;
};

// Tracks the four error quantities across iterations.
struct ProfileTracker {
  ErrorProfile current{};
  bool all_resolved = false;

  /// Updates from labeled data; returns the largest absolute change.
  double update(const LabelState& state) {
    const std::optional<double> fresh[4] = {
        state.labeled_conditional({.a_hat = true}, {.y = true, .a = false}),
        state.labeled_conditional({.a_hat = false}, {.y = true, .a = true}),
        state.labeled_conditional({.a_hat = true}, {.y = true, .a = false, .y_hat = true}),
        state.labeled_conditional({.a_hat = false}, {.y = true, .a = true, .y_hat = true}),
    };
    double* slots[4] = {&current.g1, &current.g2, &current.delta1, &current.delta2};
    double change = 0.0;
    all_resolved = true;
    for (int k = 0; k < 4; ++k) {
      if (!fresh[k]) {
        all_resolved = false;
        continue;
      }
      change = std::max(change, std::fabs(*fresh[k] - *slots[k]));
      *slots[k] = *fresh[k];
    }
    return change;
  }
};

// Removes k uniformly chosen entries from `candidates` (partial Fisher-Yates).
std::vector<std::size_t> draw(std::vector<std::size_t>& candidates, std::size_t k, std::mt19937_64& rng) {
  k = std::min(k, candidates.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
    std::swap(candidates[i], candidates[pick(rng)]);
  }
  std::vector<std::size_t> chosen(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k));
  candidates.erase(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k));
  return chosen;
}

TraceStep snapshot(std::size_t iteration, const LabelState& state, const ErrorProfile& profile,
                   const std::optional<Rates>& rates) {
  TraceStep step;
  step.iteration = iteration;
  step.labels_used = state.labeled_count();
  step.g1 = profile.g1;
  step.g2 = profile.g2;
  step.delta1 = profile.delta1;
  step.delta2 = profile.delta2;
  if (rates) {
    step.r_hat = rates->r;
    step.s_hat = rates->s;
  }
  step.general = state.general(profile, rates);
  step.plug_in = state.plug_in();
  step.direct = state.direct();
  return step;
}

SamplingResult batch_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                              const BatchConfig& config, Frame frame) {
  if (config.batch == 0) throw Error(ErrorCode::InvalidArgument, "batch must be >= 1");
  LabelState state(pool, config.options);
  OracleSession session(oracle, config.budget);
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> unlabeled;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (frame == Frame::All || state.record(i).y) unlabeled.push_back(i);
  }

  SamplingResult result;
  result.trace.headline = config.headline;
  ProfileTracker tracker;
  for (std::size_t iter = 1;; ++iter) {
    if (iter > config.max_iters) {
      result.trace.reason = Termination::MaxIterations;
      break;
    }
    if (unlabeled.empty()) {
      result.trace.reason = Termination::PoolExhausted;
      break;
    }
    const std::size_t k = std::min(config.batch, session.state().remaining());
    if (k == 0) {
      result.trace.reason = Termination::BudgetExhausted;
      break;
    }
    state.reveal(session, draw(unlabeled, k, rng));
    tracker.update(state);
    const auto rates = frame == Frame::All ? state.labeled_rates() : state.positive_rates();
    result.trace.steps.push_back(snapshot(iter, state, tracker.current, rates));
  }
  if (!result.trace.steps.empty()) {
    result.estimate = result.trace.steps.back().headline(config.headline);
  } else {
    result.estimate = Estimate::missing(ErrorCode::PoolExhausted, "nothing was revealed");
  }
  result.oracle_state = session.state();
  return result;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Active: return "active";
    case Strategy::Uniform: return "uniform";
    case Strategy::Positive: return "positive";
    case Strategy::Direct: return "direct";
  }
  return "unknown";
}

std::string to_string(TraceEstimator e) {
  switch (e) {
    case TraceEstimator::PlugIn: return "plug-in";
    case TraceEstimator::General: return "general";
    case TraceEstimator::Direct: return "direct";
  }
  return "unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::BudgetExhausted: return "budget_exhausted";
    case Termination::PoolExhausted: return "pool_exhausted";
    case Termination::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

const Estimate& TraceStep::headline(TraceEstimator kind) const {
  switch (kind) {
    case TraceEstimator::General: return general;
    case TraceEstimator::Direct: return direct;
    case TraceEstimator::PlugIn: break;
  }
  return plug_in;
}

SamplingResult active_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                               const ActiveConfig& config) {
  if (config.reveal == 0 || config.batch < config.reveal) {
    throw Error(ErrorCode::InvalidArgument, "need b >= w >= 1");
  }
  if (!(config.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  LabelState state(pool, config.options);
  OracleSession session(oracle, config.budget);
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> unlabeled;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& rec = state.record(i);
    if (!rec.y) continue;
    if (!rec.score) throw Error(ErrorCode::InvalidArgument, "positive record '" + rec.id + "' has no score");
    unlabeled.push_back(i);
  }

  SamplingResult result;
  result.trace.headline = config.headline;
  ProfileTracker tracker;  // starts at zero for all four quantities
  std::optional<Rates> rates;

  auto finish = [&](Termination reason) {
    result.trace.reason = reason;
    if (!rates) {
      result.estimate = Estimate::missing(ErrorCode::PoolExhausted, "initial batch was never drawn");
    } else {
      result.estimate = state.general(tracker.current, rates);
    }
    result.oracle_state = session.state();
    return result;
  };

  if (unlabeled.size() < config.batch) return finish(Termination::PoolExhausted);
  if (!session.can_reveal(config.batch)) return finish(Termination::BudgetExhausted);
  state.reveal(session, draw(unlabeled, config.batch, rng));
  rates = state.positive_rates();
  result.trace.steps.push_back(snapshot(0, state, tracker.current, rates));

  for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
    if (unlabeled.size() < config.batch) return finish(Termination::PoolExhausted);
    if (!session.can_reveal(config.reveal)) return finish(Termination::BudgetExhausted);

    std::vector<std::size_t> candidates = draw(unlabeled, config.batch, rng);
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t lhs, std::size_t rhs) {
      const double ul = std::fabs(*state.record(lhs).score - 0.5);
      const double ur = std::fabs(*state.record(rhs).score - 0.5);
      if (ul != ur) return ul < ur;
      return state.record(lhs).id < state.record(rhs).id;
    });
    const std::vector<std::size_t> chosen(candidates.begin(),
                                          candidates.begin() + static_cast<std::ptrdiff_t>(config.reveal));
    unlabeled.insert(unlabeled.end(), candidates.begin() + static_cast<std::ptrdiff_t>(config.reveal),
                     candidates.end());

    state.reveal(session, chosen);
    const double change = tracker.update(state);
    result.trace.steps.push_back(snapshot(iter, state, tracker.current, rates));
    if (tracker.all_resolved && change <= config.epsilon) return finish(Termination::Converged);
  }
  return finish(Termination::MaxIterations);
}

SamplingResult uniform_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                                const BatchConfig& config) {
  return batch_sampling(pool, oracle, config, Frame::All);
}

SamplingResult positive_sampling(std::span<const PredictionRecord> pool, AttributeOracle& oracle,
                                 const BatchConfig& config) {
  return batch_sampling(pool, oracle, config, Frame::Positive);
}

double direct_estimation(std::span<const PredictionRecord> labeled) {
  return true_bias(build_joint_table(labeled, AttributeSource::TrueA));
}

double plug_in_bias(std::span<const PredictionRecord> pool, const std::unordered_map<std::string, bool>& revealed) {
  std::vector<PredictionRecord> view(pool.begin(), pool.end());
  for (auto& rec : view) {
    const auto it = revealed.find(rec.id);
    rec.a = it == revealed.end() ? std::nullopt : std::optional<bool>(it->second);
  }
  return proxybias::plug_in_bias(view);
}

std::optional<std::size_t> labels_to_reach(const SamplingTrace& trace, double truth, double tolerance) {
  for (const auto& step : trace.steps) {
    const Estimate& e = step.headline(trace.headline);
    if (e.value && std::fabs(*e.value - truth) < tolerance) return step.labels_used;
  }
  return std::nullopt;
}

}  // namespace proxybias::sampling
