#include "proxybias/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "proxybias/error.hpp"
#include "proxybias/kernels.hpp"

namespace proxybias::theory {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

std::vector<double> feasible_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / step));
  grid.reserve(steps + 2);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double g = lo + static_cast<double>(k) * step;
    if (g > hi) break;
    grid.push_back(g);
  }
  // The upper end is always a grid point, even when step does not divide the interval.
  if (grid.empty() || hi - grid.back() > step * 1e-9) {
    grid.push_back(hi);
  } else {
    grid.back() = hi;
  }
  return grid;
}

}  // namespace

GammaScan gamma_scan(const ScanConfig& config) {
  const double r = config.r;
  const double s = config.s;
  const double U = config.U;
  require(r > 0.0 && r <= 1.0 && s > 0.0 && s <= 1.0, "base rates must lie in (0,1]");
  require(r + s <= 1.0 + 1e-12, "r + s must not exceed 1");
  require(U >= 0.0 && std::isfinite(U), "error budget must be >= 0");
  require(config.step > 0.0 && std::isfinite(config.step), "step must be > 0");

  // s*g1 + r*g2 = U with g2 in [0,1]  <=>  g1 in [(U - r)/s, U/s].
  const double lo = std::max(0.0, (U - r) / s);
  const double hi = std::min(1.0, U / s);
  if (lo > hi) {
    throw Error(ErrorCode::InfeasibleBudget, "no (g1, g2) in [0,1]^2 with s*g1 + r*g2 = " + std::to_string(U));
  }

  const std::vector<double> g1 = feasible_grid(lo, hi, config.step);
  std::vector<double> g2(g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i) g2[i] = std::clamp((U - s * g1[i]) / r, 0.0, 1.0);
  std::vector<double> gamma(g1.size());
  kernels::distortion_batch(g1, g2, r, s, gamma);

  GammaScan scan;
  scan.config = config;
  scan.g1_min = lo;
  scan.g1_max = hi;
  scan.points.reserve(g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i) scan.points.push_back({g1[i], g2[i], gamma[i]});
  scan.max_gamma = *std::max_element(gamma.begin(), gamma.end());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] >= scan.max_gamma - GammaScan::kArgmaxTolerance) scan.argmax.push_back(i);
  }
  return scan;
}

GammaScan gamma_scan(const ErrorBudget& budget, double step) {
  return gamma_scan(ScanConfig{budget.r, budget.r, budget.U, step});
}

std::vector<ErrorSplit> optimal_error_split(const ErrorBudget& budget) {
  require(budget.r > 0.0 && budget.r <= 0.5, "equal base rates need r in (0, 0.5]");
  require(budget.U >= 0.0, "error budget must be >= 0");
  if (budget.U > 2.0 * budget.r) {
    throw Error(ErrorCode::InfeasibleBudget, "U/r exceeds 2");
  }
  const double u = budget.U / budget.r;
  std::vector<ErrorSplit> out;
  auto add = [&out](ErrorSplit p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  if (u <= 1.0) {
    add({0.0, u});
    add({u, 0.0});
  }
  if (u >= 1.0) {
    add({u - 1.0, 1.0});
    add({1.0, u - 1.0});
  }
  return out;
}

std::array<CounterexampleRow, 6> bayes_counterexample_rows() {
  // Bayes-optimal a_hat with ties at P(a|x) = 1/2 resolved as in the original table.
  return {{
      {true, false, true, true, false},
      {true, true, true, true, true},
      {true, true, false, true, true},
      {true, false, false, true, false},
      {true, true, true, false, true},
      {true, false, false, false, false},
  }};
}

std::vector<PredictionRecord> bayes_counterexample_records() {
  std::vector<PredictionRecord> records;
  int i = 0;
  for (const auto& row : bayes_counterexample_rows()) {
    PredictionRecord rec;
    rec.id = "q" + std::to_string(++i);
    rec.y = row.y;
    rec.y_hat = row.x2;
    rec.a = row.a;
    rec.a_hat = row.a_hat;
    records.push_back(rec);
  }
  return records;
}

JointTable bayes_counterexample() {
  return build_joint_table(bayes_counterexample_records(), AttributeSource::Both);
}

IndistinguishablePair indistinguishable_pair(std::span<const XYAtom> base, const std::vector<bool>& labeling,
                                             std::uint64_t seed) {
  std::map<std::size_t, std::array<double, 2>> mass_by_x;  // [y=0, y=1]
  for (const auto& atom : base) {
    require(atom.x < labeling.size(), "atom x outside labeling");
    require(std::isfinite(atom.mass) && atom.mass >= 0.0, "atom mass must be finite and >= 0");
    mass_by_x[atom.x][atom.y ? 1 : 0] += atom.mass;
  }
  double mass_a = 0.0;  // {f=1, y=1}
  double mass_b = 0.0;  // {f=0, y=1}
  for (const auto& [x, m] : mass_by_x) (labeling[x] ? mass_a : mass_b) += m[1];
  if (!(mass_a > 0.0)) throw Error(ErrorCode::BayesOptimalInput, "region {f=1, y=1} is empty");
  if (!(mass_b > 0.0)) throw Error(ErrorCode::BayesOptimalInput, "region {f=0, y=1} is empty");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<bool> h(labeling.size());
  for (std::size_t x = 0; x < h.size(); ++x) h[x] = coin(rng);

  std::vector<XYAAtom> q1;
  std::vector<XYAAtom> q2;
  double xa_gap = 0.0;
  JointTable::Cells cells1{};
  JointTable::Cells cells2{};
  auto emit = [&](std::vector<XYAAtom>& q, JointTable::Cells& cells, std::size_t x, bool y, bool a, double m) {
    if (!(m > 0.0)) return;
    q.push_back({x, y, a, m});
    cells[cell_index(y, a, labeling[x], h[x])] += m;
  };

  for (const auto& [x, m] : mass_by_x) {
    const double m0 = m[0];
    const double m1 = m[1];
    const bool f = labeling[x];

    // y=1: fair coin under Q1, a = f(x) under Q2.
    emit(q1, cells1, x, true, true, 0.5 * m1);
    emit(q1, cells1, x, true, false, 0.5 * m1);
    emit(q2, cells2, x, true, f, m1);

    // y=0 absorbs the (x, a=1) imbalance d = Q2 - Q1 from the y=1 slice
    // when it has the mass to; otherwise both stay a fair coin.
    const double d = f ? 0.5 * m1 : -0.5 * m1;
    double p1 = 0.5;
    double p2 = 0.5;
    if (m0 > 0.0 && std::fabs(d) <= m0) {
      p1 = 0.5 + d / (2.0 * m0);
      p2 = 0.5 - d / (2.0 * m0);
    }
    emit(q1, cells1, x, false, true, p1 * m0);
    emit(q1, cells1, x, false, false, (1.0 - p1) * m0);
    emit(q2, cells2, x, false, true, p2 * m0);
    emit(q2, cells2, x, false, false, (1.0 - p2) * m0);

    const double xa1 = 0.5 * m1 + p1 * m0;
    const double xa2 = (f ? m1 : 0.0) + p2 * m0;
    xa_gap = std::max(xa_gap, std::fabs(xa1 - xa2));
  }
  return IndistinguishablePair{std::move(q1), std::move(q2), std::move(h),
                               JointTable(cells1, AttributeSource::Both),
                               JointTable(cells2, AttributeSource::Both), xa_gap};
}

}  // namespace proxybias::theory
