#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "proxybias/audit.hpp"
#include "proxybias/error.hpp"
#include "proxybias/estimators.hpp"
#include "proxybias/io.hpp"
#include "proxybias/kernels.hpp"
#include "proxybias/report_json.hpp"
#include "proxybias/sampling.hpp"
#include "proxybias/simulate.hpp"
#include "proxybias/theory.hpp"

namespace proxybias::cli {

namespace {

using report::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Reads a JSON object whose keys mirror long flag names; nested objects
// are subcommand sections, e.g. {"kernel": "scalar", "audit": {"seed": 3}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json doc;
    try {
      input >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

 private:
  static void collect(const Json& node, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      if (it->is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar_text(v, it.key()));
      } else {
        item.inputs.push_back(scalar_text(*it, it.key()));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar_text(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config key '" + key + "' has an unsupported value");
  }
};

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }
Json optional_json(const std::optional<std::uint64_t>& v, int) { return v ? Json(*v) : Json(nullptr); }

class ReportWriter {
 public:
  explicit ReportWriter(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  Json& config() { return config_; }
  Json& payload() { return payload_; }
  Json& warnings() { return warnings_; }
  void set_seed(std::optional<std::uint64_t> seed) { seed_ = seed; }

  Json finish() const {
    Json doc;
    doc["command"] = command_;
    doc["config"] = config_;
    doc["seed"] = optional_json(seed_, 0);
    doc["kernel"] = std::string(kernels::to_string(kernels::active_isa()));
    doc["payload"] = payload_;
    doc["warnings"] = warnings_;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    doc["wall_time_s"] = elapsed.count();
    return doc;
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  Json config_ = Json::object();
  Json payload_ = Json::object();
  Json warnings_ = Json::array();
  std::optional<std::uint64_t> seed_;
};

void emit(const Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write report to " + path);
  file << text;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidParams:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

// ---------------------------------------------------------------- audit

struct AuditOptions {
  std::string input;
  std::string estimator = "all";
  std::string common_data;
  std::optional<double> labeled_fraction;
  std::optional<std::uint64_t> seed;
  double pseudo_count = 0.0;
  std::string output;
};

EstimatorSet parse_estimators(const std::string& name) {
  if (name == "naive") return EstimatorSet::Naive;
  if (name == "corrected") return EstimatorSet::Corrected;
  if (name == "general") return EstimatorSet::General;
  if (name == "direct") return EstimatorSet::Direct;
  return EstimatorSet::All;
}

int run_audit(const AuditOptions& opt, std::ostream& out) {
  ReportWriter rw("audit");
  rw.set_seed(opt.seed);
  rw.config() = Json{{"input", opt.input},
                     {"estimator", opt.estimator},
                     {"common_data", opt.common_data.empty() ? Json(nullptr) : Json(opt.common_data)},
                     {"labeled_fraction", optional_json(opt.labeled_fraction)},
                     {"pseudo_count", opt.pseudo_count}};
  if (opt.labeled_fraction && !opt.seed) {
    throw Error(ErrorCode::InvalidArgument, "--labeled-fraction needs an explicit --seed");
  }

  const io::Dataset input = io::read_dataset(opt.input);
  std::vector<PredictionRecord> common;
  std::vector<PredictionRecord> plug_in_pool;
  if (!opt.common_data.empty()) {
    common = io::read_dataset(opt.common_data).records;
  } else if (opt.labeled_fraction) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < input.records.size(); ++i) {
      if (input.records[i].a) candidates.push_back(i);
    }
    std::mt19937_64 rng(*opt.seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const auto take = static_cast<std::size_t>(std::llround(*opt.labeled_fraction * static_cast<double>(candidates.size())));
    candidates.resize(std::min(take, candidates.size()));
    std::sort(candidates.begin(), candidates.end());

    std::vector<bool> labeled(input.records.size(), false);
    for (const std::size_t i : candidates) {
      labeled[i] = true;
      common.push_back(input.records[i]);
    }
    plug_in_pool = input.records;
    for (std::size_t i = 0; i < plug_in_pool.size(); ++i) {
      if (!labeled[i]) plug_in_pool[i].a.reset();
    }
  }

  AuditInputs in;
  in.evaluation = input.records;
  in.common = common;
  in.plug_in_pool = plug_in_pool;
  in.estimators = parse_estimators(opt.estimator);
  in.options.pseudo_count = opt.pseudo_count;
  const BiasReport result = audit(in);

  rw.payload() = report::bias_report_json(result, rw.warnings());
  emit(rw.finish(), opt.output, out);

  const bool any = (includes(in.estimators, EstimatorSet::Naive) && result.naive_signed.has_value()) ||
                   (includes(in.estimators, EstimatorSet::Corrected) && result.corrected_abs.has_value()) ||
                   (includes(in.estimators, EstimatorSet::General) && result.general_signed.has_value()) ||
                   (includes(in.estimators, EstimatorSet::Direct) && result.direct_signed.has_value());
  return any ? kExitOk : kExitFailure;
}

// ------------------------------------------------------------- simulate

struct SimulateOptions {
  sim::SimParams params;
  std::optional<double> neg_a1_fraction, neg_alpha, neg_beta, neg_g1, neg_g2;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string report_path;
};

int run_simulate(SimulateOptions opt, std::ostream& out) {
  ReportWriter rw("simulate");
  rw.set_seed(opt.seed);
  opt.params.seed = opt.seed;
  if (opt.neg_a1_fraction || opt.neg_alpha || opt.neg_beta || opt.neg_g1 || opt.neg_g2) {
    sim::NegativeSlice neg = opt.params.resolved_negative();
    if (opt.neg_a1_fraction) neg.a1_fraction = *opt.neg_a1_fraction;
    if (opt.neg_alpha) neg.alpha = *opt.neg_alpha;
    if (opt.neg_beta) neg.beta = *opt.neg_beta;
    if (opt.neg_g1) neg.g1 = *opt.neg_g1;
    if (opt.neg_g2) neg.g2 = *opt.neg_g2;
    opt.params.negative = neg;
  }
  const sim::SimParams& p = opt.params;
  const sim::NegativeSlice neg = p.resolved_negative();
  rw.config() = Json{{"alpha", p.alpha},
                     {"beta", p.beta},
                     {"r", p.r},
                     {"s", p.s},
                     {"g1", p.g1},
                     {"g2", p.g2},
                     {"negative",
                      {{"a1_fraction", neg.a1_fraction},
                       {"alpha", neg.alpha},
                       {"beta", neg.beta},
                       {"g1", neg.g1},
                       {"g2", neg.g2}}},
                     {"coupling", p.coupling},
                     {"score_noise", p.score_noise},
                     {"n", opt.n},
                     {"output", opt.output}};

  const JointTable exact = sim::exact_table(p);
  const std::vector<PredictionRecord> records = sim::sample_records(p, opt.n);
  io::write_dataset(std::filesystem::path(opt.output), records);

  Json exact_json;
  exact_json["true_bias"] = true_bias(exact);
  exact_json["naive_bias"] = naive_bias(exact);
  try {
    exact_json["gamma"] = distortion_factor(p.g1, p.g2, Rates{p.r, p.s});
  } catch (const Error& e) {
    exact_json["gamma"] = nullptr;
    rw.warnings().push_back(Json{{"field", "exact.gamma"}, {"code", std::string(to_string(e.code()))}, {"detail", e.what()}});
  }
  exact_json["ci_violation"] = ci_violation(exact);
  exact_json["table"] = report::joint_table_json(exact);

  AuditInputs in;
  in.evaluation = records;
  in.estimators = EstimatorSet::Naive;
  const BiasReport empirical = audit(in);
  Json sample_json;
  sample_json["n"] = records.size();
  sample_json["true_bias"] = report::estimate_json(empirical.true_bias_signed, "sample.true_bias", rw.warnings());
  sample_json["naive"] = report::estimate_json(empirical.naive_signed, "sample.naive", rw.warnings());

  rw.payload() = Json{{"exact", exact_json}, {"sample", sample_json}};
  emit(rw.finish(), opt.report_path, out);
  return kExitOk;
}

// --------------------------------------------------------------- sample

struct SampleOptions {
  std::string input;
  std::string strategy = "active";
  std::size_t batch = 100;
  std::size_t reveal = 100;
  double epsilon = 0.01;
  std::string oracle = "inline";
  std::string exchange_dir = "oracle_exchange";
  std::size_t oracle_timeout_ms = 600000;
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  std::size_t max_iters = 200;
  std::string estimator = "plug-in";
  double pseudo_count = 0.0;
  std::string trace_csv;
  std::string output;
};

sampling::TraceEstimator parse_trace_estimator(const std::string& name) {
  if (name == "general") return sampling::TraceEstimator::General;
  if (name == "direct") return sampling::TraceEstimator::Direct;
  return sampling::TraceEstimator::PlugIn;
}

void write_trace_csv(const std::string& path, const sampling::SamplingTrace& trace) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write trace to " + path);
  auto num = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  f << "iteration,labels_used,g1,g2,delta1,delta2,r_hat,s_hat,general,plug_in,direct\n";
  for (const auto& s : trace.steps) {
    f << s.iteration << ',' << s.labels_used << ',' << io::format_double(s.g1) << ',' << io::format_double(s.g2) << ','
      << io::format_double(s.delta1) << ',' << io::format_double(s.delta2) << ',' << num(s.r_hat) << ','
      << num(s.s_hat) << ',' << num(s.general.value) << ',' << num(s.plug_in.value) << ',' << num(s.direct.value)
      << '\n';
  }
}

int run_sample(const SampleOptions& opt, std::ostream& out) {
  ReportWriter rw("sample");
  rw.set_seed(opt.seed);
  rw.config() = Json{{"input", opt.input},
                     {"strategy", opt.strategy},
                     {"b", opt.batch},
                     {"w", opt.reveal},
                     {"epsilon", opt.epsilon},
                     {"oracle", opt.oracle},
                     {"budget", optional_json(opt.budget)},
                     {"max_iters", opt.max_iters},
                     {"estimator", opt.strategy == "direct" ? std::string("direct") : opt.estimator},
                     {"pseudo_count", opt.pseudo_count}};

  const io::Dataset input = io::read_dataset(opt.input);
  std::unique_ptr<sampling::AttributeOracle> oracle;
  if (opt.oracle == "file-exchange") {
    oracle = std::make_unique<sampling::FileExchangeOracle>(
        opt.exchange_dir, std::chrono::milliseconds(static_cast<std::int64_t>(opt.oracle_timeout_ms)));
  } else {
    oracle = std::make_unique<sampling::InMemoryOracle>(input.records);
  }

  EstimatorOptions est;
  est.pseudo_count = opt.pseudo_count;
  sampling::SamplingResult result;
  if (opt.strategy == "active") {
    sampling::ActiveConfig cfg;
    cfg.batch = opt.batch;
    cfg.reveal = opt.reveal;
    cfg.epsilon = opt.epsilon;
    cfg.max_iters = opt.max_iters;
    cfg.budget = opt.budget;
    cfg.seed = opt.seed;
    cfg.headline = parse_trace_estimator(opt.estimator);
    cfg.options = est;
    result = sampling::active_sampling(input.records, *oracle, cfg);
  } else {
    sampling::BatchConfig cfg;
    cfg.batch = opt.batch;
    cfg.max_iters = opt.max_iters;
    cfg.budget = opt.budget;
    cfg.seed = opt.seed;
    cfg.headline = opt.strategy == "direct" ? sampling::TraceEstimator::Direct : parse_trace_estimator(opt.estimator);
    cfg.options = est;
    result = opt.strategy == "uniform" ? sampling::uniform_sampling(input.records, *oracle, cfg)
                                       : sampling::positive_sampling(input.records, *oracle, cfg);
  }

  Json payload;
  payload["estimate"] = report::estimate_json(result.estimate, "estimate", rw.warnings());
  payload["oracle"] = Json{{"queries_used", result.oracle_state.queries_used},
                           {"budget", optional_json(result.oracle_state.budget)}};
  bool pool_has_a = !input.records.empty();
  for (const auto& rec : input.records) pool_has_a = pool_has_a && rec.a.has_value();
  if (pool_has_a && opt.oracle != "file-exchange") {
    try {
      payload["pool_true_bias"] = true_bias(build_joint_table(input.records, AttributeSource::TrueA));
    } catch (const Error&) {
      payload["pool_true_bias"] = nullptr;
    }
  }
  payload["trace"] = report::trace_json(result.trace, rw.warnings());
  rw.payload() = payload;
  if (!opt.trace_csv.empty()) write_trace_csv(opt.trace_csv, result.trace);
  emit(rw.finish(), opt.output, out);
  return kExitOk;
}

// ----------------------------------------------------------- scan-gamma

struct ScanOptions {
  double r = 0.0;
  std::optional<double> s;
  double U = 0.0;
  double step = 1e-3;
  std::string output;
  std::string report_path;
};

int run_scan(const ScanOptions& opt, std::ostream& out) {
  ReportWriter rw("scan-gamma");
  const double s = opt.s.value_or(opt.r);
  rw.config() = Json{{"r", opt.r}, {"s", s}, {"U", opt.U}, {"step", opt.step},
                     {"output", opt.output.empty() ? Json(nullptr) : Json(opt.output)}};

  const theory::GammaScan scan = theory::gamma_scan(theory::ScanConfig{opt.r, s, opt.U, opt.step});
  Json payload = report::gamma_scan_json(scan);
  if (s == opt.r) {
    Json closed = Json::array();
    for (const auto& p : theory::optimal_error_split(theory::ErrorBudget{opt.U, opt.r})) {
      double gamma = 0.0;
      try {
        gamma = distortion_factor(p.g1, p.g2, Rates{opt.r, s});
      } catch (const Error&) {
        gamma = 0.0;  // 0/0 corner; the limit along the budget line is 0
      }
      closed.push_back(Json{{"g1", p.g1}, {"g2", p.g2}, {"gamma", gamma}});
    }
    payload["optimal_error_split"] = closed;
  }
  if (!opt.output.empty()) {
    std::ofstream csv(opt.output);
    if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write " + opt.output);
    io::write_scan_csv(csv, scan);
  }
  rw.payload() = payload;
  emit(rw.finish(), opt.report_path, out);
  return kExitOk;
}

// ------------------------------------------------------- counterexample

int run_counterexample(const std::string& output, std::ostream& out) {
  ReportWriter rw("counterexample");
  const JointTable table = theory::bayes_counterexample();

  Json rows = Json::array();
  for (const auto& row : theory::bayes_counterexample_rows()) {
    rows.push_back(Json{{"x1", int{row.x1}}, {"x2", int{row.x2}}, {"a", int{row.a}}, {"y", int{row.y}},
                        {"a_hat", int{row.a_hat}}, {"mass", "1/6"}});
  }
  const ConditionalErrors g = conditional_errors(table);
  const Deltas d = deltas(table);
  const Rates rt = rates(table);
  const GroupRates noisy = naive_rates(table);

  Json payload;
  payload["rows"] = rows;
  payload["table"] = report::joint_table_json(table);
  payload["true_bias"] = true_bias(table);
  payload["naive_bias"] = noisy.gap();
  payload["error_profile"] = Json{{"g1", g.g1}, {"g2", g.g2}, {"delta1", d.delta1}, {"delta2", d.delta2}};
  payload["rates"] = Json{{"r", rt.r}, {"s", rt.s}};
  payload["ci_violation"] = ci_violation(table);

  auto attempt = [](const std::function<double()>& f) {
    try {
      return Estimate::of(f());
    } catch (const Error& e) {
      return Estimate::missing(e.code(), e.what());
    }
  };
  const Estimate gamma = attempt([&] { return distortion_factor(g.g1, g.g2, rt); });
  payload["gamma"] = report::estimate_json(gamma, "gamma", rw.warnings(), false);
  const Estimate corrected = gamma.has_value()
                                 ? attempt([&] { return corrected_bias(std::fabs(noisy.gap()), *gamma.value).value; })
                                 : gamma;
  payload["corrected"] = report::estimate_json(corrected, "corrected", rw.warnings(), false);
  const Estimate general = attempt([&] {
    return general_corrected_bias(noisy.group1, noisy.group0, ErrorProfile{g.g1, g.g2, d.delta1, d.delta2}, rt);
  });
  payload["general"] = report::estimate_json(general, "general", rw.warnings());

  rw.payload() = payload;
  emit(rw.finish(), output, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equal-opportunity bias estimation with proxy sensitive attributes", "proxybias"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags (flags win)");
  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "Kernel variant")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  AuditOptions audit_opt;
  auto* audit_cmd = app.add_subcommand("audit", "Estimate the bias of a label classifier from a prediction file");
  audit_cmd->add_option("input", audit_opt.input, "Evaluation CSV")->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--estimator", audit_opt.estimator)
      ->check(CLI::IsMember({"naive", "corrected", "general", "direct", "all"}));
  auto* common_flag = audit_cmd->add_option("--common-data", audit_opt.common_data, "CSV with true and predicted attributes")
                          ->check(CLI::ExistingFile);
  audit_cmd->add_option("--labeled-fraction", audit_opt.labeled_fraction,
                        "Use this fraction of the input's attribute-labeled rows as common data")
      ->check(CLI::Range(0.0, 1.0))
      ->excludes(common_flag);
  audit_cmd->add_option("--seed", audit_opt.seed);
  audit_cmd->add_option("--pseudo-count", audit_opt.pseudo_count)->check(CLI::NonNegativeNumber);
  audit_cmd->add_option("-o,--output", audit_opt.output, "Report path (default stdout)");

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a synthetic prediction file");
  sim_cmd->add_option("--alpha", sim_opt.params.alpha, "P(y_hat=1 | y=1, a=1)")->capture_default_str();
  sim_cmd->add_option("--beta", sim_opt.params.beta, "P(y_hat=1 | y=1, a=0)")->capture_default_str();
  sim_cmd->add_option("--r", sim_opt.params.r, "P(y=1, a=1)")->capture_default_str();
  sim_cmd->add_option("--s", sim_opt.params.s, "P(y=1, a=0)")->capture_default_str();
  sim_cmd->add_option("--g1", sim_opt.params.g1, "P(a_hat != a | a=0, y=1)")->capture_default_str();
  sim_cmd->add_option("--g2", sim_opt.params.g2, "P(a_hat != a | a=1, y=1)")->capture_default_str();
  sim_cmd->add_option("--coupling", sim_opt.params.coupling)->capture_default_str();
  sim_cmd->add_option("--score-noise", sim_opt.params.score_noise)->capture_default_str();
  sim_cmd->add_option("--neg-a1-fraction", sim_opt.neg_a1_fraction, "P(a=1 | y=0)");
  sim_cmd->add_option("--neg-alpha", sim_opt.neg_alpha, "P(y_hat=1 | y=0, a=1)");
  sim_cmd->add_option("--neg-beta", sim_opt.neg_beta, "P(y_hat=1 | y=0, a=0)");
  sim_cmd->add_option("--neg-g1", sim_opt.neg_g1, "P(a_hat=1 | y=0, a=0)");
  sim_cmd->add_option("--neg-g2", sim_opt.neg_g2, "P(a_hat=0 | y=0, a=1)");
  sim_cmd->add_option("-n", sim_opt.n, "Number of records")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_opt.seed)->required();
  sim_cmd->add_option("-o,--output", sim_opt.output, "CSV path")->required();
  sim_cmd->add_option("--report", sim_opt.report_path, "Report path (default stdout)");

  SampleOptions sample_opt;
  auto* sample_cmd = app.add_subcommand("sample", "Acquire true attributes under a label budget");
  sample_cmd->add_option("input", sample_opt.input, "Pool CSV")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--strategy", sample_opt.strategy)
      ->check(CLI::IsMember({"active", "uniform", "positive", "direct"}));
  sample_cmd->add_option("-b,--batch", sample_opt.batch)->check(CLI::PositiveNumber)->capture_default_str();
  sample_cmd->add_option("-w,--reveal", sample_opt.reveal)->check(CLI::PositiveNumber)->capture_default_str();
  sample_cmd->add_option("--epsilon", sample_opt.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  sample_cmd->add_option("--oracle", sample_opt.oracle)->check(CLI::IsMember({"inline", "file-exchange"}));
  sample_cmd->add_option("--exchange-dir", sample_opt.exchange_dir);
  sample_cmd->add_option("--oracle-timeout-ms", sample_opt.oracle_timeout_ms);
  sample_cmd->add_option("--budget", sample_opt.budget);
  sample_cmd->add_option("--seed", sample_opt.seed)->required();
  sample_cmd->add_option("--max-iters", sample_opt.max_iters)->check(CLI::PositiveNumber)->capture_default_str();
  sample_cmd->add_option("--estimator", sample_opt.estimator, "Per-iteration estimate tracked in the trace")
      ->check(CLI::IsMember({"plug-in", "general", "direct"}));
  sample_cmd->add_option("--pseudo-count", sample_opt.pseudo_count)->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--trace-csv", sample_opt.trace_csv);
  sample_cmd->add_option("-o,--output", sample_opt.output, "Report path (default stdout)");

  ScanOptions scan_opt;
  auto* scan_cmd = app.add_subcommand("scan-gamma", "Distortion factor along an error-budget line");
  scan_cmd->add_option("--r", scan_opt.r)->required();
  scan_cmd->add_option("--s", scan_opt.s, "Defaults to r");
  scan_cmd->add_option("--U", scan_opt.U)->required();
  scan_cmd->add_option("--step", scan_opt.step)->check(CLI::PositiveNumber)->capture_default_str();
  scan_cmd->add_option("-o,--output", scan_opt.output, "Curve CSV path");
  scan_cmd->add_option("--report", scan_opt.report_path, "Report path (default stdout)");

  std::string counter_output;
  auto* counter_cmd = app.add_subcommand("counterexample", "Bayes-optimal attribute classifier counterexample");
  counter_cmd->add_option("-o,--output", counter_output, "Report path (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("proxybias");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (kernel == "scalar") kernels::set_active_isa(kernels::Isa::Scalar);
    if (kernel == "avx2") kernels::set_active_isa(kernels::Isa::Avx2);
    if (kernel == "auto") kernels::set_active_isa(kernels::detected_isa());

    if (*audit_cmd) return run_audit(audit_opt, out);
    if (*sim_cmd) return run_simulate(sim_opt, out);
    if (*sample_cmd) {
      if (sample_opt.reveal > sample_opt.batch) throw Error(ErrorCode::InvalidArgument, "-w must not exceed -b");
      return run_sample(sample_opt, out);
    }
    if (*scan_cmd) return run_scan(scan_opt, out);
    if (*counter_cmd) return run_counterexample(counter_output, out);
  } catch (const Error& e) {
    err << "proxybias: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "proxybias: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace proxybias::cli
