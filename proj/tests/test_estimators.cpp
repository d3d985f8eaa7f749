#include <doctest.h>

#include <cmath>
#include <random>

#include "proxybias/estimators.hpp"
#include "proxybias/simulate.hpp"
#include "proxybias/theory.hpp"
#include "support.hpp"

using namespace proxybias;

namespace {

JointTable counterexample() { return theory::bayes_counterexample(); }

JointTable uniform_table() {
  JointTable::Cells c;
  c.fill(1.0);
  return JointTable(c, AttributeSource::Both);
}

// Table with a_hat == a, built from arbitrary masses on the other axes.
JointTable perfect_proxy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  JointTable::Cells c{};
  for (const bool y : {false, true}) {
    for (const bool a : {false, true}) {
      for (const bool yh : {false, true}) c[cell_index(y, a, yh, a)] = u(rng);
    }
  }
  return JointTable(c, AttributeSource::Both);
}

sim::SimParams forward_params(double alpha, double beta, double g1, double g2) {
  sim::SimParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.r = 0.25;
  p.s = 0.25;
  p.g1 = g1;
  p.g2 = g2;
  return p;
}

}  // namespace

TEST_CASE("rates") {
  const Rates c = rates(counterexample());
  CHECK(c.r == doctest::Approx(1.0 / 3.0));
  CHECK(c.s == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(c.missing_group());

  JointTable::Cells point{};
  point[cell_index(true, true, true, true)] = 1.0;
  const Rates p = rates(JointTable(point, AttributeSource::Both));
  CHECK(p.r == 1.0);
  CHECK(p.s == 0.0);
  CHECK(p.missing_group());

  const Rates u = rates(uniform_table());
  CHECK(u.r == 0.25);
  CHECK(u.s == 0.25);
}

TEST_CASE("true bias") {
  CHECK(true_bias(counterexample()) == 0.0);

  JointTable::Cells c{};
  c[cell_index(true, true, true, true)] = 1.0;
  c[cell_index(true, false, false, false)] = 1.0;
  CHECK(true_bias(JointTable(c, AttributeSource::Both)) == 1.0);

  JointTable::Cells one{};
  one[cell_index(true, true, true, true)] = 1.0;
  CHECK(test::code_of([&] { true_bias(JointTable(one, AttributeSource::Both)); }) == ErrorCode::MissingGroup);
}

TEST_CASE("naive bias") {
  CHECK(naive_bias(counterexample()) == 1.0);
  const JointTable perfect = perfect_proxy(3);
  CHECK(naive_bias(perfect) == doctest::Approx(true_bias(perfect)).epsilon(1e-15));
  CHECK(naive_bias(sim::exact_table(forward_params(1.0, 0.0, 0.25, 0.25))) == doctest::Approx(0.5).epsilon(1e-12));

  JointTable::Cells c{};
  c[cell_index(true, true, true, true)] = 1.0;
  c[cell_index(true, false, true, true)] = 1.0;
  CHECK(test::code_of([&] { naive_bias(JointTable(c, AttributeSource::Both)); }) ==
        ErrorCode::EmptyPredictedGroup);
}

TEST_CASE("conditional errors") {
  const ConditionalErrors c = conditional_errors(counterexample());
  CHECK(c.g1 == 0.5);
  CHECK(c.g2 == 0.5);
  const ConditionalErrors p = conditional_errors(perfect_proxy(5));
  CHECK(p.g1 == 0.0);
  CHECK(p.g2 == 0.0);

  JointTable::Cells flipped{};
  for (const bool a : {false, true}) {
    flipped[cell_index(true, a, true, !a)] = 1.0;
    flipped[cell_index(true, a, false, !a)] = 2.0;
  }
  const ConditionalErrors f = conditional_errors(JointTable(flipped, AttributeSource::Both));
  CHECK(f.g1 == 1.0);
  CHECK(f.g2 == 1.0);
}

TEST_CASE("deltas") {
  const Deltas c = deltas(counterexample());
  CHECK(c.delta1 == 1.0);
  CHECK(c.delta2 == 0.0);
  const Deltas p = deltas(perfect_proxy(7));
  CHECK(p.delta1 == 0.0);
  CHECK(p.delta2 == 0.0);

  sim::SimParams coin = forward_params(0.7, 0.5, 0.5, 0.5);
  const Deltas d = deltas(sim::exact_table(coin));
  CHECK(d.delta1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.delta2 == doctest::Approx(0.5).epsilon(1e-12));

  JointTable::Cells c0{};
  c0[cell_index(true, true, true, true)] = 1.0;
  c0[cell_index(true, false, false, false)] = 1.0;
  try {
    deltas(JointTable(c0, AttributeSource::Both));
    FAIL("expected MissingConditioningEvent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingConditioningEvent);
    CHECK(std::string(e.what()).find("a=0") != std::string::npos);
  }
}

TEST_CASE("distortion factor") {
  CHECK(distortion_factor(0.0, 0.0, Rates{0.3, 0.3}) == 1.0);
  CHECK(distortion_factor(0.6, 0.4, Rates{0.2, 0.5}) == 0.0);
  CHECK(distortion_factor(0.2, 0.1, Rates{0.25, 0.25}) == doctest::Approx(0.7 / (0.9 * 1.1)).epsilon(1e-14));
  CHECK(test::code_of([] { distortion_factor(0.1, 0.1, Rates{0.0, 0.3}); }) == ErrorCode::MissingGroup);
  CHECK(test::code_of([] { distortion_factor(1.0, 0.0, Rates{0.3, 0.3}); }) == ErrorCode::ZeroDenominator);

  // The exact forward map on a synthetic table shrinks alpha - beta by gamma.
  const JointTable t = sim::exact_table(forward_params(0.9, 0.3, 0.2, 0.1));
  CHECK(naive_bias(t) == doctest::Approx(distortion_factor(0.2, 0.1, Rates{0.25, 0.25}) * 0.6).epsilon(1e-12));
}

TEST_CASE("forward noisy estimates") {
  const GroupRates same = forward_noisy_estimates(0.4, 0.4, Rates{0.2, 0.6}, 0.3, 0.1);
  CHECK(same.group1 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(same.group0 == doctest::Approx(0.4).epsilon(1e-15));
  const GroupRates id = forward_noisy_estimates(0.8, 0.35, Rates{0.2, 0.6}, 0.0, 0.0);
  CHECK(id.group1 == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(id.group0 == doctest::Approx(0.35).epsilon(1e-15));
  const GroupRates ex = forward_noisy_estimates(1.0, 0.0, Rates{0.25, 0.25}, 0.25, 0.25);
  CHECK(ex.group1 == doctest::Approx(0.75));
  CHECK(ex.group0 == doctest::Approx(0.25));
  CHECK(test::code_of([] { forward_noisy_estimates(0.5, 0.5, Rates{0.3, 0.3}, 0.0, 1.0); }) ==
        ErrorCode::ZeroDenominator);
}

TEST_CASE("forward map agrees with the exact table") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 200; ++k) {
    sim::SimParams p;
    p.alpha = u(rng);
    p.beta = u(rng);
    p.r = 0.45 * u(rng);
    p.s = 0.45 * u(rng);
    p.g1 = u(rng);
    p.g2 = u(rng);
    const JointTable t = sim::exact_table(p);
    const GroupRates noisy = forward_noisy_estimates(p.alpha, p.beta, Rates{p.r, p.s}, p.g1, p.g2);
    const GroupRates seen = naive_rates(t);
    CHECK(std::fabs(noisy.group1 - seen.group1) < 1e-12);
    CHECK(std::fabs(noisy.group0 - seen.group0) < 1e-12);
    CHECK(ci_violation(t) < 1e-12);
  }
}

TEST_CASE("corrected bias") {
  CHECK(corrected_bias(0.5, 0.5).value == 1.0);
  CHECK_FALSE(corrected_bias(0.5, 0.5).clamped);
  CHECK(corrected_bias(0.37, 1.0).value == 0.37);
  CHECK(test::code_of([] { corrected_bias(0.1, 0.0); }) == ErrorCode::UninvertibleDistortion);
  const CorrectedBias over = corrected_bias(0.6, 0.5);
  CHECK(over.value == 1.0);
  CHECK(over.clamped);
}

TEST_CASE("general corrected bias") {
  CHECK(general_corrected_bias(0.75, 0.25, ErrorProfile{0.25, 0.25, 0.25, 0.25}, Rates{0.3, 0.3}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(general_corrected_bias(0.62, 0.41, ErrorProfile{}, Rates{0.2, 0.4}) == doctest::Approx(0.21).epsilon(1e-14));

  const JointTable c = counterexample();
  const GroupRates n = naive_rates(c);
  CHECK(test::code_of([&] { general_corrected_bias(n.group1, n.group0, error_profile(c), rates(c)); }) ==
        ErrorCode::DegenerateDeltas);
  CHECK(test::code_of([] { general_corrected_bias(0.5, 0.4, ErrorProfile{}, Rates{0.0, 0.2}); }) ==
        ErrorCode::MissingGroup);
}

TEST_CASE("ci violation") {
  CHECK(ci_violation(counterexample()) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(ci_violation(uniform_table()) == 0.0);
  CHECK(ci_violation(sim::exact_table(forward_params(0.7, 0.5, 0.2, 0.3))) < 1e-12);
}

TEST_CASE("estimators agree with brute-force record sums") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 20; ++k) {
    std::vector<PredictionRecord> rs;
    std::bernoulli_distribution coin(0.3 + 0.02 * k);
    for (int i = 0; i < 400; ++i) {
      rs.push_back(test::rec("r" + std::to_string(i), coin(rng), coin(rng), coin(rng), coin(rng)));
    }
    const JointTable t = build_joint_table(rs, AttributeSource::Both);
    auto count = [&](auto pred) {
      double n = 0;
      for (const auto& r : rs) n += pred(r);
      return n;
    };
    const double g1 = count([](const auto& r) { return r.y && !*r.a && *r.a_hat; }) /
                      count([](const auto& r) { return r.y && !*r.a; });
    const double g2 = count([](const auto& r) { return r.y && *r.a && !*r.a_hat; }) /
                      count([](const auto& r) { return r.y && *r.a; });
    const double d1 = count([](const auto& r) { return r.y && r.y_hat && !*r.a && *r.a_hat; }) /
                      count([](const auto& r) { return r.y && r.y_hat && !*r.a; });
    const double d2 = count([](const auto& r) { return r.y && r.y_hat && *r.a && !*r.a_hat; }) /
                      count([](const auto& r) { return r.y && r.y_hat && *r.a; });
    const double r1 = count([](const auto& r) { return r.y && *r.a; }) / 400.0;
    const double s1 = count([](const auto& r) { return r.y && !*r.a; }) / 400.0;

    const ErrorProfile p = error_profile(t);
    const Rates rt = rates(t);
    CHECK(std::fabs(p.g1 - g1) < 1e-12);
    CHECK(std::fabs(p.g2 - g2) < 1e-12);
    CHECK(std::fabs(p.delta1 - d1) < 1e-12);
    CHECK(std::fabs(p.delta2 - d2) < 1e-12);
    CHECK(std::fabs(rt.r - r1) < 1e-12);
    CHECK(std::fabs(rt.s - s1) < 1e-12);
  }
}

TEST_CASE("perfect proxy collapse") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const JointTable t = perfect_proxy(seed);
    const double truth = true_bias(t);
    CHECK(naive_bias(t) == doctest::Approx(truth).epsilon(1e-15));
    const Rates rt = rates(t);
    const double gamma = distortion_factor(0.0, 0.0, rt);
    CHECK(gamma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(corrected_bias(std::fabs(naive_bias(t)), gamma).value == doctest::Approx(std::fabs(truth)).epsilon(1e-15));
    const GroupRates n = naive_rates(t);
    CHECK(general_corrected_bias(n.group1, n.group0, error_profile(t), rt) == doctest::Approx(truth).epsilon(1e-14));
  }
}

TEST_CASE("pseudo count smooths empty events") {
  JointTable::Cells c{};
  c[cell_index(true, true, true, true)] = 3.0;
  c[cell_index(true, false, false, false)] = 3.0;
  const JointTable t(c, AttributeSource::Both);
  CHECK(test::code_of([&] { deltas(t); }) == ErrorCode::MissingConditioningEvent);
  const Deltas d = deltas(t, EstimatorOptions{1.0});
  CHECK(d.delta1 == 0.5);
  CHECK(d.delta2 == doctest::Approx(0.2));
}
