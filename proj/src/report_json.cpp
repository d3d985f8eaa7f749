#include "proxybias/report_json.hpp"

#include <cmath>

namespace proxybias::report {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json estimate_json(const Estimate& e, const std::string& field, Json& warnings, bool with_abs) {
  if (!e.has_value()) {
    if (e.reason) {
      warnings.push_back(Json{{"field", field}, {"code", std::string(to_string(*e.reason))}, {"detail", e.detail}});
    }
    return Json(nullptr);
  }
  if (e.clamped) {
    warnings.push_back(Json{{"field", field}, {"code", "Clamped"}, {"detail", "estimate exceeded 1 and was clamped"}});
  }
  if (!with_abs) return Json(*e.value);
  return Json{{"signed", *e.value}, {"abs", std::fabs(*e.value)}};
}

Json bias_report_json(const BiasReport& r, Json& warnings) {
  Json out;
  out["true_bias"] = estimate_json(r.true_bias_signed, "true_bias", warnings);
  out["naive"] = estimate_json(r.naive_signed, "naive", warnings);
  out["gamma"] = estimate_json(r.gamma, "gamma", warnings, false);
  Json corrected = estimate_json(r.corrected_abs, "corrected", warnings, false);
  out["corrected"] = corrected.is_null() ? corrected : Json{{"abs", corrected}, {"clamped", r.corrected_abs.clamped}};
  out["general"] = estimate_json(r.general_signed, "general", warnings);
  out["direct"] = estimate_json(r.direct_signed, "direct", warnings);
  out["plug_in"] = estimate_json(r.plug_in_signed, "plug_in", warnings);

  Json profile;
  profile["g1"] = r.conditional_errors ? Json(r.conditional_errors->g1) : Json(nullptr);
  profile["g2"] = r.conditional_errors ? Json(r.conditional_errors->g2) : Json(nullptr);
  profile["delta1"] = r.deltas ? Json(r.deltas->delta1) : Json(nullptr);
  profile["delta2"] = r.deltas ? Json(r.deltas->delta2) : Json(nullptr);
  out["error_profile"] = profile;
  out["rates"] = r.rates ? Json{{"r", r.rates->r}, {"s", r.rates->s}} : Json(nullptr);
  out["ci_violation"] = optional_number(r.ci_violation);
  out["n_evaluation"] = r.n_evaluation;
  out["n_labeled"] = r.n_labeled;
  return out;
}

Json gamma_scan_json(const theory::GammaScan& scan) {
  Json out;
  out["r"] = scan.config.r;
  out["s"] = scan.config.s;
  out["U"] = scan.config.U;
  out["step"] = scan.config.step;
  out["g1_min"] = scan.g1_min;
  out["g1_max"] = scan.g1_max;
  out["points"] = scan.points.size();
  out["max_gamma"] = scan.max_gamma;
  Json argmax = Json::array();
  for (const std::size_t i : scan.argmax) {
    const auto& p = scan.points[i];
    argmax.push_back(Json{{"g1", p.g1}, {"g2", p.g2}, {"gamma", p.gamma}});
  }
  out["argmax"] = argmax;
  return out;
}

Json trace_json(const sampling::SamplingTrace& trace, Json& warnings) {
  Json steps = Json::array();
  Json step_warnings = Json::array();  // per-step degeneracy is routine early on; kept out of the top level
  for (const auto& s : trace.steps) {
    Json j;
    j["iteration"] = s.iteration;
    j["labels_used"] = s.labels_used;
    j["g1"] = s.g1;
    j["g2"] = s.g2;
    j["delta1"] = s.delta1;
    j["delta2"] = s.delta2;
    j["r_hat"] = optional_number(s.r_hat);
    j["s_hat"] = optional_number(s.s_hat);
    j["general"] = estimate_json(s.general, "general", step_warnings, false);
    j["plug_in"] = estimate_json(s.plug_in, "plug_in", step_warnings, false);
    j["direct"] = estimate_json(s.direct, "direct", step_warnings, false);
    steps.push_back(std::move(j));
  }
  if (!trace.steps.empty()) {
    const Estimate& last = trace.steps.back().headline(trace.headline);
    if (!last.has_value()) estimate_json(last, "trace.final_" + to_string(trace.headline), warnings, false);
  }
  Json out;
  out["estimator"] = to_string(trace.headline);
  out["termination"] = to_string(trace.reason);
  out["steps"] = steps;
  return out;
}

Json joint_table_json(const JointTable& table) {
  Json cells = Json::array();
  for (std::size_t i = 0; i < kCellCount; ++i) {
    if (table.cells()[i] == 0.0) continue;
    cells.push_back(Json{{"y", (i >> 3) & 1},
                         {"a", (i >> 2) & 1},
                         {"y_hat", (i >> 1) & 1},
                         {"a_hat", i & 1},
                         {"mass", table.cells()[i]}});
  }
  return Json{{"axes", to_string(table.axes())}, {"total", table.total()}, {"cells", cells}};
}

}  // namespace proxybias::report
