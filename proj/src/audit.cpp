#include "proxybias/audit.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "proxybias/kernels.hpp"

namespace proxybias {

namespace {

Estimate attempt(const std::function<double()>& compute) {
  try {
    return Estimate::of(compute());
  } catch (const Error& e) {
    return Estimate::missing(e.code(), e.what());
  }
}

}  // namespace

double plug_in_bias(std::span<const PredictionRecord> pool) {
  if (pool.empty()) throw Error(ErrorCode::EmptyInput, "empty pool");
  std::vector<std::uint8_t> codes;
  codes.reserve(pool.size());
  for (const auto& rec : pool) {
    const std::optional<bool> group = rec.a ? rec.a : rec.a_hat;
    if (!group) throw Error(ErrorCode::MissingField, "record '" + rec.id + "' has neither a nor a_hat");
    // Group goes on the a_hat slot so naive_rates reads it back.
    codes.push_back(cell_index(rec.y, false, rec.y_hat, *group));
  }
  const kernels::CellCounts counts = kernels::tally_cells(codes);
  JointTable::Cells cells{};
  for (std::size_t i = 0; i < kCellCount; ++i) cells[i] = static_cast<double>(counts[i]);
  return naive_bias(JointTable(cells, AttributeSource::PredictedA));
}

BiasReport audit(const AuditInputs& in) {
  BiasReport report;
  report.n_evaluation = in.evaluation.size();
  report.n_labeled = in.common.size();

  std::optional<JointTable> eval_table;
  Estimate eval_failure;
  try {
    eval_table = build_joint_table(in.evaluation, AttributeSource::PredictedA);
  } catch (const Error& e) {
    eval_failure = Estimate::missing(e.code(), std::string("evaluation data: ") + e.what());
  }

  // True bias needs a on every evaluation record.
  bool eval_has_a = !in.evaluation.empty();
  for (const auto& rec : in.evaluation) eval_has_a = eval_has_a && rec.a.has_value();
  if (eval_has_a) {
    report.true_bias_signed = attempt([&] { return true_bias(build_joint_table(in.evaluation, AttributeSource::TrueA)); });
  } else {
    report.true_bias_signed = Estimate::missing(ErrorCode::MissingField, "evaluation data lacks true attributes");
  }

  std::optional<GroupRates> noisy;
  if (eval_table) {
    try {
      noisy = naive_rates(*eval_table);
      report.naive_signed = Estimate::of(noisy->gap());
    } catch (const Error& e) {
      report.naive_signed = Estimate::missing(e.code(), e.what());
    }
  } else {
    report.naive_signed = eval_failure;
  }

  std::optional<JointTable> common_table;
  Estimate common_failure = Estimate::missing(ErrorCode::EmptyInput, "no common data");
  if (!in.common.empty()) {
    try {
      common_table = build_joint_table(in.common, AttributeSource::Both);
    } catch (const Error& e) {
      common_failure = Estimate::missing(e.code(), std::string("common data: ") + e.what());
    }
  }

  if (common_table) {
    report.rates = rates(*common_table);
    report.ci_violation = ci_violation(*common_table);
    try {
      report.conditional_errors = conditional_errors(*common_table, in.options);
    } catch (const Error&) {
    }
    try {
      report.deltas = deltas(*common_table, in.options);
    } catch (const Error&) {
    }
    if (report.conditional_errors && report.deltas) {
      report.error_profile = ErrorProfile{report.conditional_errors->g1, report.conditional_errors->g2,
                                          report.deltas->delta1, report.deltas->delta2};
    }
  }

  auto needs_common = [&](const std::function<Estimate()>& body) {
    return common_table ? body() : common_failure;
  };

  if (includes(in.estimators, EstimatorSet::Corrected) || includes(in.estimators, EstimatorSet::General)) {
    report.gamma = needs_common([&] {
      return attempt([&] {
        const ConditionalErrors g = conditional_errors(*common_table, in.options);
        return distortion_factor(g.g1, g.g2, *report.rates);
      });
    });
  }

  if (includes(in.estimators, EstimatorSet::Corrected)) {
    if (!report.naive_signed.has_value()) {
      report.corrected_abs = report.naive_signed;
    } else if (!report.gamma.has_value()) {
      report.corrected_abs = report.gamma;
    } else {
      try {
        const CorrectedBias c = corrected_bias(std::fabs(*report.naive_signed.value), *report.gamma.value);
        report.corrected_abs = Estimate::of(c.value, c.clamped);
      } catch (const Error& e) {
        report.corrected_abs = Estimate::missing(e.code(), e.what());
      }
    }
  }

  if (includes(in.estimators, EstimatorSet::General)) {
    if (!noisy) {
      report.general_signed = report.naive_signed;
    } else {
      report.general_signed = needs_common([&] {
        return attempt([&] {
          const ErrorProfile p = error_profile(*common_table, in.options);
          return general_corrected_bias(noisy->group1, noisy->group0, p, *report.rates);
        });
      });
    }
  }

  if (includes(in.estimators, EstimatorSet::Direct)) {
    report.direct_signed = needs_common([&] { return attempt([&] { return true_bias(*common_table); }); });
  }

  if (!includes(in.estimators, EstimatorSet::Naive) && !includes(in.estimators, EstimatorSet::Corrected) &&
      !includes(in.estimators, EstimatorSet::General)) {
    report.naive_signed = Estimate::not_requested();
  }

  if (!in.plug_in_pool.empty()) {
    report.plug_in_signed = attempt([&] { return plug_in_bias(in.plug_in_pool); });
  }
  return report;
}

}  // namespace proxybias
