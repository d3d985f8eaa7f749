#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "proxybias/estimators.hpp"
#include "proxybias/sampling.hpp"
#include "proxybias/simulate.hpp"
#include "support.hpp"

using namespace proxybias;
using namespace proxybias::sampling;

namespace {

std::vector<PredictionRecord> pool_of(std::size_t n, std::uint64_t seed, double coupling = 0.0) {
  sim::SimParams p;
  p.seed = seed;
  p.coupling = coupling;
  return sim::sample_records(p, n);
}

std::vector<PredictionRecord> perfect_pool(std::size_t n) {
  sim::SimParams p;
  p.g1 = 0.0;
  p.g2 = 0.0;
  p.negative = sim::NegativeSlice{0.5, 0.3, 0.5, 0.0, 0.0};
  p.score_noise = 0.0;
  p.seed = 4;
  return sim::sample_records(p, n);
}

// Records every id it is asked about.
class RecordingOracle final : public AttributeOracle {
 public:
  explicit RecordingOracle(std::span<const PredictionRecord> rs) : inner_(rs) {}
  std::vector<bool> reveal(std::span<const std::string> ids) override {
    asked.insert(asked.end(), ids.begin(), ids.end());
    return inner_.reveal(ids);
  }
  std::vector<std::string> asked;

 private:
  InMemoryOracle inner_;
};

double pool_truth(const std::vector<PredictionRecord>& pool) {
  return true_bias(build_joint_table(pool, AttributeSource::TrueA));
}

}  // namespace

TEST_CASE("active sampling on a perfect proxy") {
  const auto pool = perfect_pool(4000);
  InMemoryOracle oracle(pool);
  ActiveConfig cfg;
  cfg.epsilon = 0.01;
  const SamplingResult res = active_sampling(pool, oracle, cfg);
  CHECK(res.trace.reason == Termination::Converged);
  const TraceStep& last = res.trace.steps.back();
  CHECK(last.g1 == 0.0);
  CHECK(last.g2 == 0.0);
  CHECK(last.delta1 == 0.0);
  CHECK(last.delta2 == 0.0);
  REQUIRE(res.estimate.value);
  const double naive = naive_bias(build_joint_table(pool, AttributeSource::PredictedA));
  CHECK(*res.estimate.value == doctest::Approx(naive).epsilon(1e-12));
  CHECK(*res.estimate.value == doctest::Approx(pool_truth(pool)).epsilon(1e-12));
}

TEST_CASE("epsilon of one stops after the first comparison") {
  const auto pool = pool_of(3000, 1);
  InMemoryOracle oracle(pool);
  ActiveConfig cfg;
  cfg.epsilon = 1.0;
  const SamplingResult res = active_sampling(pool, oracle, cfg);
  CHECK(res.trace.reason == Termination::Converged);
  CHECK(res.trace.steps.size() == 2);
}

TEST_CASE("labels grow by w per iteration and no id is revealed twice") {
  const auto pool = pool_of(6000, 2, 0.3);
  RecordingOracle oracle(pool);
  ActiveConfig cfg;
  cfg.batch = 150;
  cfg.reveal = 40;
  cfg.epsilon = 1e-9;
  cfg.max_iters = 30;
  const SamplingResult res = active_sampling(pool, oracle, cfg);
  REQUIRE(res.trace.steps.size() >= 2);
  CHECK(res.trace.steps[0].labels_used == 150);
  for (std::size_t i = 1; i < res.trace.steps.size(); ++i) {
    CHECK(res.trace.steps[i].labels_used == res.trace.steps[i - 1].labels_used + 40);
  }
  const std::set<std::string> distinct(oracle.asked.begin(), oracle.asked.end());
  CHECK(distinct.size() == oracle.asked.size());
  CHECK(res.oracle_state.queries_used == distinct.size());
  CHECK(res.oracle_state.revealed.size() == distinct.size());
  for (const auto& id : oracle.asked) {
    const auto it = std::find_if(pool.begin(), pool.end(), [&](const auto& r) { return r.id == id; });
    CHECK(it->y);
  }
  if (res.trace.reason == Termination::MaxIterations) CHECK(res.trace.steps.size() == 31);
}

TEST_CASE("active sampling reveals the most uncertain candidates") {
  const auto pool = pool_of(3000, 3);
  RecordingOracle oracle(pool);
  ActiveConfig cfg;
  cfg.batch = 200;
  cfg.reveal = 20;
  cfg.max_iters = 1;
  cfg.epsilon = 1e-9;
  active_sampling(pool, oracle, cfg);
  REQUIRE(oracle.asked.size() == 220);
  std::unordered_map<std::string, double> score;
  for (const auto& r : pool) score[r.id] = std::fabs(*r.score - 0.5);
  double worst_chosen = 0.0;
  for (std::size_t i = 200; i < 220; ++i) worst_chosen = std::max(worst_chosen, score[oracle.asked[i]]);
  double mean_initial = 0.0;
  for (std::size_t i = 0; i < 200; ++i) mean_initial += score[oracle.asked[i]] / 200.0;
  CHECK(worst_chosen < mean_initial);
}

TEST_CASE("budget and pool exhaustion") {
  const auto pool = pool_of(2000, 5);
  {
    InMemoryOracle oracle(pool);
    ActiveConfig cfg;
    cfg.batch = 100;
    cfg.reveal = 50;
    cfg.epsilon = 1e-12;
    cfg.budget = 275;
    const SamplingResult res = active_sampling(pool, oracle, cfg);
    CHECK(res.trace.reason == Termination::BudgetExhausted);
    CHECK(res.oracle_state.queries_used == 250);
  }
  {
    InMemoryOracle oracle(pool);
    ActiveConfig cfg;
    cfg.batch = 400;
    cfg.reveal = 400;
    cfg.epsilon = 1e-12;
    const SamplingResult res = active_sampling(pool, oracle, cfg);
    CHECK(res.trace.reason == Termination::PoolExhausted);
  }
  {
    InMemoryOracle oracle(pool);
    BatchConfig cfg;
    cfg.batch = 300;
    cfg.budget = 700;
    const SamplingResult res = uniform_sampling(pool, oracle, cfg);
    CHECK(res.trace.reason == Termination::BudgetExhausted);
    CHECK(res.oracle_state.queries_used == 700);
    CHECK(res.trace.steps.back().labels_used == 700);
  }
}

TEST_CASE("active sampling input validation") {
  const auto pool = pool_of(500, 6);
  InMemoryOracle oracle(pool);
  ActiveConfig cfg;
  cfg.batch = 10;
  cfg.reveal = 20;
  CHECK(test::code_of([&] { active_sampling(pool, oracle, cfg); }) == ErrorCode::InvalidArgument);
  cfg.reveal = 5;
  cfg.epsilon = 0.0;
  CHECK(test::code_of([&] { active_sampling(pool, oracle, cfg); }) == ErrorCode::InvalidArgument);
  auto unscored = pool;
  for (auto& r : unscored) r.score.reset();
  cfg.epsilon = 0.1;
  CHECK(test::code_of([&] { active_sampling(unscored, oracle, cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("uniform and positive coincide on an all-positive pool") {
  auto pool = pool_of(4000, 7);
  std::erase_if(pool, [](const auto& r) { return !r.y; });
  InMemoryOracle o1(pool), o2(pool);
  BatchConfig cfg;
  cfg.seed = 3;
  cfg.max_iters = 10;
  const auto u = uniform_sampling(pool, o1, cfg);
  const auto p = positive_sampling(pool, o2, cfg);
  REQUIRE(u.trace.steps.size() == p.trace.steps.size());
  for (std::size_t i = 0; i < u.trace.steps.size(); ++i) {
    CHECK(u.trace.steps[i].labels_used == p.trace.steps[i].labels_used);
    CHECK(u.trace.steps[i].g1 == p.trace.steps[i].g1);
    CHECK(u.trace.steps[i].delta2 == p.trace.steps[i].delta2);
    CHECK(u.trace.steps[i].plug_in.value == p.trace.steps[i].plug_in.value);
    CHECK(u.trace.steps[i].general.value == p.trace.steps[i].general.value);
  }
}

TEST_CASE("one batch covering the pool gives the full-information inversion") {
  const auto pool = pool_of(3000, 8, 0.5);
  InMemoryOracle oracle(pool);
  BatchConfig cfg;
  cfg.batch = pool.size();
  cfg.headline = TraceEstimator::General;
  const auto res = uniform_sampling(pool, oracle, cfg);
  REQUIRE(res.trace.steps.size() == 1);
  const JointTable full = build_joint_table(pool, AttributeSource::Both);
  const GroupRates noisy = naive_rates(full);
  const double expected = general_corrected_bias(noisy.group1, noisy.group0, error_profile(full), rates(full));
  REQUIRE(res.estimate.value);
  CHECK(*res.estimate.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(*res.estimate.value == doctest::Approx(pool_truth(pool)).epsilon(1e-9));
  CHECK(*res.trace.steps[0].plug_in.value == doctest::Approx(pool_truth(pool)).epsilon(1e-12));
  CHECK(*res.trace.steps[0].direct.value == doctest::Approx(pool_truth(pool)).epsilon(1e-12));
}

TEST_CASE("positive sampling needs no more labels than uniform") {
  std::vector<double> uni, pos;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pool = pool_of(8000, 100 + seed, 0.2);
    const double truth = pool_truth(pool);
    BatchConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 1000;
    InMemoryOracle o1(pool), o2(pool);
    const auto reach = [&](const SamplingResult& r) {
      return static_cast<double>(labels_to_reach(r.trace, truth, 0.02).value_or(pool.size() + 1));
    };
    uni.push_back(reach(uniform_sampling(pool, o1, cfg)));
    pos.push_back(reach(positive_sampling(pool, o2, cfg)));
  }
  double mu = 0, mp = 0;
  for (std::size_t i = 0; i < uni.size(); ++i) {
    mu += uni[i] / 10.0;
    mp += pos[i] / 10.0;
  }
  CHECK(mp <= mu);
}

TEST_CASE("uncertainty sorting pays off when w < b") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pool = pool_of(10000, 200 + seed, 0.2);
    const double truth = pool_truth(pool);
    ActiveConfig ac;
    ac.batch = 400;
    ac.reveal = 100;
    ac.epsilon = 1e-12;
    ac.max_iters = 1000;
    ac.seed = seed;
    BatchConfig bc;
    bc.seed = seed;
    bc.max_iters = 1000;
    InMemoryOracle o1(pool), o2(pool);
    const auto active = labels_to_reach(active_sampling(pool, o1, ac).trace, truth, 0.02);
    const auto positive = labels_to_reach(positive_sampling(pool, o2, bc).trace, truth, 0.02);
    if (active && (!positive || *active < *positive)) ++wins;
  }
  CHECK(wins >= 8);
}

TEST_CASE("runs are deterministic per seed") {
  const auto pool = pool_of(3000, 9, 0.3);
  ActiveConfig cfg;
  cfg.batch = 120;
  cfg.reveal = 60;
  cfg.seed = 77;
  InMemoryOracle o1(pool), o2(pool);
  const auto a = active_sampling(pool, o1, cfg);
  const auto b = active_sampling(pool, o2, cfg);
  REQUIRE(a.trace.steps.size() == b.trace.steps.size());
  for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
    CHECK(a.trace.steps[i].g1 == b.trace.steps[i].g1);
    CHECK(a.trace.steps[i].plug_in.value == b.trace.steps[i].plug_in.value);
  }
  CHECK(a.estimate.value == b.estimate.value);
}

TEST_CASE("direct estimation") {
  const auto pool = pool_of(3000, 10);
  CHECK(direct_estimation(pool) == pool_truth(pool));
  const std::vector<PredictionRecord> two = {test::rec("a", true, true, true, std::nullopt),
                                             test::rec("b", true, false, false, std::nullopt)};
  CHECK(direct_estimation(two) == 1.0);
  const std::vector<PredictionRecord> one_group = {test::rec("a", true, true, true, std::nullopt)};
  CHECK(test::code_of([&] { direct_estimation(one_group); }) == ErrorCode::MissingGroup);
}

TEST_CASE("plug-in bias between naive and true") {
  const auto pool = pool_of(3000, 11, 0.4);
  std::unordered_map<std::string, bool> none, all, half;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    all[pool[i].id] = *pool[i].a;
    if (i % 2 == 0) half[pool[i].id] = *pool[i].a;
  }
  CHECK(plug_in_bias(pool, all) == doctest::Approx(pool_truth(pool)).epsilon(1e-15));
  CHECK(plug_in_bias(pool, none) ==
        doctest::Approx(naive_bias(build_joint_table(pool, AttributeSource::PredictedA))).epsilon(1e-15));

  const auto perfect = perfect_pool(2000);
  std::unordered_map<std::string, bool> p_half;
  for (std::size_t i = 0; i < perfect.size(); i += 2) p_half[perfect[i].id] = *perfect[i].a;
  const double t = pool_truth(perfect);
  CHECK(plug_in_bias(perfect, p_half) == doctest::Approx(t).epsilon(1e-14));
  CHECK(plug_in_bias(perfect, {}) == doctest::Approx(t).epsilon(1e-14));
}

TEST_CASE("labels to reach") {
  SamplingTrace trace;
  trace.headline = TraceEstimator::Direct;
  for (int i = 1; i <= 4; ++i) {
    TraceStep s;
    s.labels_used = static_cast<std::size_t>(100 * i);
    s.direct = Estimate::of(0.3 - 0.05 * i);
    trace.steps.push_back(s);
  }
  CHECK(labels_to_reach(trace, 0.1, 0.02) == 400);
  CHECK(labels_to_reach(trace, 0.2, 0.051) == 100);
  CHECK_FALSE(labels_to_reach(trace, 0.9, 0.02));
}
