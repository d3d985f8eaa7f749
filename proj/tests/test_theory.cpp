#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "proxybias/estimators.hpp"
#include "proxybias/io.hpp"
#include "proxybias/theory.hpp"
#include "support.hpp"

using namespace proxybias;
using namespace proxybias::theory;

namespace {

double brute_gamma(double g1, double g2, double r, double s) {
  const double num = std::fabs(1.0 - g1 - g2);
  if (num == 0.0) return 0.0;
  return num / ((s / r * (1 - g1) + g2) * (r / s * (1 - g2) + g1));
}

std::vector<double> argmax_g1(const GammaScan& scan) {
  std::vector<double> out;
  for (const auto i : scan.argmax) out.push_back(scan.points[i].g1);
  return out;
}

}  // namespace

TEST_CASE("scan at U/r = 0.4 peaks at both ends") {
  const GammaScan scan = gamma_scan(ScanConfig{0.25, 0.25, 0.1, 1e-3});
  CHECK(scan.g1_min == 0.0);
  CHECK(scan.g1_max == doctest::Approx(0.4));
  const auto g = argmax_g1(scan);
  REQUIRE(g.size() == 2);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(0.4));
}

TEST_CASE("scan at U = r is flat at zero") {
  const GammaScan scan = gamma_scan(ScanConfig{0.3, 0.3, 0.3, 1e-2});
  for (const auto& p : scan.points) CHECK(p.gamma == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unequal rates peak at an end of the feasible interval") {
  const GammaScan scan = gamma_scan(ScanConfig{0.3, 0.1, 0.06, 1e-3});
  CHECK(scan.g1_min == 0.0);
  CHECK(scan.g1_max == doctest::Approx(0.6));
  for (const double g : argmax_g1(scan)) {
    CHECK((std::fabs(g - scan.g1_min) <= 1e-3 || std::fabs(g - scan.g1_max) <= 1e-3));
  }
}

TEST_CASE("scan values match a brute-force evaluation and include both ends") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.02, 0.48);
  for (int k = 0; k < 30; ++k) {
    const double r = u(rng), s = u(rng);
    const double U = (r + s) * u(rng);
    const double step = 0.0137;
    const GammaScan scan = gamma_scan(ScanConfig{r, s, U, step});
    CHECK(scan.points.front().g1 == scan.g1_min);
    CHECK(scan.points.back().g1 == scan.g1_max);
    CHECK(scan.g1_min == doctest::Approx(std::max(0.0, (U - r) / s)));
    CHECK(scan.g1_max == doctest::Approx(std::min(1.0, U / s)));
    for (const auto& p : scan.points) {
      CHECK(s * p.g1 + r * p.g2 == doctest::Approx(U).epsilon(1e-12));
      CHECK(p.gamma == doctest::Approx(brute_gamma(p.g1, p.g2, r, s)).epsilon(1e-12));
      CHECK(p.gamma >= 0.0);
      CHECK(p.gamma <= 1.0);
    }
  }
}

TEST_CASE("endpoint property for unequal rates") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const double r = 0.02 + 0.48 * u(rng), s = 0.02 + 0.48 * u(rng);
    const double U = (r + s) * u(rng);
    if (std::fabs(U - r) < 1e-3 * r || std::fabs(U - s) < 1e-3 * s) continue;
    const GammaScan scan = gamma_scan(ScanConfig{r, s, U, 1e-3});
    const double step = 1e-3;
    for (const double g : argmax_g1(scan)) {
      const bool near_end = std::fabs(g - scan.g1_min) <= step + 1e-12 || std::fabs(g - scan.g1_max) <= step + 1e-12;
      CHECK(near_end);
    }
    ++checked;
  }
}

TEST_CASE("scan validation") {
  CHECK(test::code_of([] { gamma_scan(ScanConfig{0.25, 0.25, 0.6, 1e-3}); }) == ErrorCode::InfeasibleBudget);
  CHECK(test::code_of([] { gamma_scan(ScanConfig{0.25, 0.25, 0.1, 0.0}); }) == ErrorCode::InvalidArgument);
  CHECK(test::code_of([] { gamma_scan(ScanConfig{0.0, 0.25, 0.1, 1e-3}); }) == ErrorCode::InvalidArgument);
  CHECK(test::code_of([] { gamma_scan(ScanConfig{0.7, 0.6, 0.1, 1e-3}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("scan csv") {
  const GammaScan scan = gamma_scan(ScanConfig{0.25, 0.25, 0.1, 0.2});
  std::ostringstream os;
  io::write_scan_csv(os, scan);
  const std::string text = os.str();
  CHECK(text.rfind("g1,g2,gamma\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(scan.points.size() + 1));
}

TEST_CASE("optimal error split") {
  const auto low = optimal_error_split(ErrorBudget{0.1, 0.5});
  REQUIRE(low.size() == 2);
  CHECK(low[0].g1 == 0.0);
  CHECK(low[0].g2 == doctest::Approx(0.2));
  CHECK(low[1].g1 == doctest::Approx(0.2));
  CHECK(low[1].g2 == 0.0);

  const auto high = optimal_error_split(ErrorBudget{0.75, 0.5});
  REQUIRE(high.size() == 2);
  CHECK(high[0].g1 == doctest::Approx(0.5));
  CHECK(high[0].g2 == 1.0);
  CHECK(high[1].g1 == 1.0);
  CHECK(high[1].g2 == doctest::Approx(0.5));

  const auto zero = optimal_error_split(ErrorBudget{0.0, 0.3});
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == ErrorSplit{0.0, 0.0});

  const auto boundary = optimal_error_split(ErrorBudget{0.3, 0.3});
  CHECK(boundary.size() == 2);
  for (const auto& p : boundary) CHECK(p.g1 + p.g2 == 1.0);

  CHECK(test::code_of([] { optimal_error_split(ErrorBudget{0.7, 0.3}); }) == ErrorCode::InfeasibleBudget);
}

TEST_CASE("closed form beats a dense brute-force search") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double r = 0.05 + 0.45 * u(rng);
    const double U = 2.0 * r * u(rng);
    double best = 0.0;
    for (const auto& p : optimal_error_split(ErrorBudget{U, r})) best = std::max(best, brute_gamma(p.g1, p.g2, r, r));
    const double lo = std::max(U / r - 1.0, 0.0), hi = std::min(U / r, 1.0);
    for (int i = 0; i <= 5000; ++i) {
      const double g1 = lo + (hi - lo) * i / 5000.0;
      CHECK(brute_gamma(g1, U / r - g1, r, r) <= best + 1e-12);
    }
  }
}

TEST_CASE("counterexample table") {
  const JointTable t = bayes_counterexample();
  CHECK(true_bias(t) == 0.0);
  CHECK(naive_bias(t) == 1.0);
  const ConditionalErrors g = conditional_errors(t);
  CHECK(g.g1 == 0.5);
  CHECK(g.g2 == 0.5);
  CHECK(ci_violation(t) == 0.25);
  for (const auto& row : bayes_counterexample_rows()) CHECK(row.x1);
  const auto records = bayes_counterexample_records();
  CHECK(records.size() == 6);
  CHECK(records.front().id == "q1");
}

TEST_CASE("indistinguishable pair on four points") {
  // f = 1 on x=0 only, so f is right everywhere except (x=1, y=1).
  const std::vector<XYAtom> base = {{0, true, 0.25}, {1, true, 0.25}, {2, false, 0.25}, {3, false, 0.25}};
  const auto pair = indistinguishable_pair(base, {true, false, false, false}, 3);
  CHECK(true_bias(pair.table1) == 0.0);
  CHECK(true_bias(pair.table2) == 1.0);
  CHECK(pair.attribute_classifier.size() == 4);

  std::map<std::pair<std::size_t, bool>, double> xy1, xy2;
  for (const auto& a : pair.q1) xy1[{a.x, a.y}] += a.mass;
  for (const auto& a : pair.q2) xy2[{a.x, a.y}] += a.mass;
  for (const auto& a : base) {
    CHECK(xy1[{a.x, a.y}] == doctest::Approx(a.mass).epsilon(1e-12));
    CHECK(xy2[{a.x, a.y}] == doctest::Approx(a.mass).epsilon(1e-12));
  }
}

TEST_CASE("indistinguishable pair matches (x, a) marginals when y=0 mass allows") {
  const std::vector<XYAtom> base = {{0, false, 0.25}, {0, true, 0.25}, {1, false, 0.25}, {1, true, 0.25}};
  const auto pair = indistinguishable_pair(base, {false, true}, 3);
  CHECK(true_bias(pair.table1) == 0.0);
  CHECK(true_bias(pair.table2) == 1.0);
  CHECK(pair.xa_marginal_gap <= 1e-12);
  std::map<std::pair<std::size_t, bool>, double> xa1, xa2;
  for (const auto& a : pair.q1) xa1[{a.x, a.a}] += a.mass;
  for (const auto& a : pair.q2) xa2[{a.x, a.a}] += a.mass;
  for (const auto& [key, m] : xa1) CHECK(xa2[key] == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("indistinguishable pair rejects a Bayes-optimal labeling") {
  const std::vector<XYAtom> base = {{0, false, 0.5}, {1, true, 0.5}};
  CHECK(test::code_of([&] { indistinguishable_pair(base, {false, true}, 1); }) == ErrorCode::BayesOptimalInput);
}

TEST_CASE("indistinguishable pair reports an unbalanceable base") {
  const std::vector<XYAtom> base = {{0, true, 0.45}, {0, false, 0.05}, {1, true, 0.45}, {1, false, 0.05}};
  const auto pair = indistinguishable_pair(base, {true, false}, 2);
  CHECK(true_bias(pair.table1) == 0.0);
  CHECK(true_bias(pair.table2) == 1.0);
  CHECK(pair.xa_marginal_gap > 0.0);
}
