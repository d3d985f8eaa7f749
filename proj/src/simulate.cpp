#include "proxybias/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "proxybias/error.hpp"

namespace proxybias::sim {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidParams, std::string(name) + " must lie in [0,1]");
}

// P(both errors) for error events with marginals p, q and coupling c.
double joint_error(double p, double q, double c) {
  const double independent = p * q;
  if (c >= 0.0) return independent + c * (std::min(p, q) - independent);
  return independent + c * (independent - std::max(0.0, p + q - 1.0));
}

std::string record_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06zu", i);
  return buf;
}

}  // namespace

NegativeSlice SimParams::resolved_negative() const {
  if (negative) return *negative;
  const double pos = r + s;
  return NegativeSlice{pos > 0.0 ? r / pos : 0.5, 1.0 - alpha, 1.0 - beta, g1, g2};
}

void SimParams::validate() const {
  require_probability(alpha, "alpha");
  require_probability(beta, "beta");
  require_probability(r, "r");
  require_probability(s, "s");
  require_probability(g1, "g1");
  require_probability(g2, "g2");
  if (r + s > 1.0) throw Error(ErrorCode::InvalidParams, "r + s must not exceed 1");
  const NegativeSlice neg = resolved_negative();
  require_probability(neg.a1_fraction, "negative.a1_fraction");
  require_probability(neg.alpha, "negative.alpha");
  require_probability(neg.beta, "negative.beta");
  require_probability(neg.g1, "negative.g1");
  require_probability(neg.g2, "negative.g2");
  if (!(coupling >= -1.0 && coupling <= 1.0)) throw Error(ErrorCode::InvalidParams, "coupling must lie in [-1,1]");
  if (!(score_noise >= 0.0 && std::isfinite(score_noise))) {
    throw Error(ErrorCode::InvalidParams, "score_noise must be finite and >= 0");
  }
}

JointTable exact_table(const SimParams& params) {
  params.validate();
  const NegativeSlice neg = params.resolved_negative();
  const double rest = 1.0 - params.r - params.s;

  JointTable::Cells cells{};
  for (const bool y : {false, true}) {
    for (const bool a : {false, true}) {
      const double weight = y ? (a ? params.r : params.s) : rest * (a ? neg.a1_fraction : 1.0 - neg.a1_fraction);
      const double p_pos = y ? (a ? params.alpha : params.beta) : (a ? neg.alpha : neg.beta);
      const double label_err = y ? 1.0 - p_pos : p_pos;
      const double attr_err = a ? (y ? params.g2 : neg.g2) : (y ? params.g1 : neg.g1);

      const double both = joint_error(label_err, attr_err, params.coupling);
      const double label_only = label_err - both;
      const double attr_only = attr_err - both;
      const double neither = 1.0 - label_err - attr_err + both;

      const bool y_hat_ok = y;
      const bool a_hat_ok = a;
      cells[cell_index(y, a, !y_hat_ok, !a_hat_ok)] += weight * std::max(0.0, both);
      cells[cell_index(y, a, !y_hat_ok, a_hat_ok)] += weight * std::max(0.0, label_only);
      cells[cell_index(y, a, y_hat_ok, !a_hat_ok)] += weight * std::max(0.0, attr_only);
      cells[cell_index(y, a, y_hat_ok, a_hat_ok)] += weight * std::max(0.0, neither);
    }
  }
  return JointTable(cells, AttributeSource::Both);
}

std::vector<PredictionRecord> sample_records(const SimParams& params, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidParams, "n must be >= 1");
  const JointTable table = exact_table(params);

  std::mt19937_64 rng(params.seed);
  std::discrete_distribution<int> pick_cell(table.cells().begin(), table.cells().end());
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<PredictionRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int cell = pick_cell(rng);
    PredictionRecord rec;
    rec.id = record_id(i);
    rec.y = (cell & 0b1000) != 0;
    rec.a = (cell & 0b0100) != 0;
    rec.y_hat = (cell & 0b0010) != 0;
    rec.a_hat = (cell & 0b0001) != 0;

    const double offset = std::min(0.5, std::fabs(noise(rng) * params.score_noise));
    const bool wrong = *rec.a_hat != *rec.a;
    const double distance = wrong ? offset : 0.5 - offset;  // distance from 0.5
    rec.score = *rec.a_hat ? 0.5 + distance : 0.5 - distance;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace proxybias::sim
