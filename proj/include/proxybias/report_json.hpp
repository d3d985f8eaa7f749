#pragma once

#include <json.hpp>
#include <string>

#include "proxybias/audit.hpp"
#include "proxybias/sampling.hpp"
#include "proxybias/theory.hpp"

namespace proxybias::report {

using Json = nlohmann::ordered_json;

/// Null-valued estimates append {"field", "code", "detail"} to `warnings`;
/// clamped ones append a "Clamped" entry.
Json estimate_json(const Estimate& e, const std::string& field, Json& warnings, bool with_abs = true);

Json bias_report_json(const BiasReport& report, Json& warnings);
Json gamma_scan_json(const theory::GammaScan& scan);
Json trace_json(const sampling::SamplingTrace& trace, Json& warnings);
Json joint_table_json(const JointTable& table);

}  // namespace proxybias::report
