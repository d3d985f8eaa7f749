#include "proxybias/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "proxybias/error.hpp"

namespace proxybias::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& why) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + why);
}

std::optional<bool> parse_flag(const std::string& text, const char* column, bool required,
                               const std::string& source, std::size_t line) {
  if (text.empty()) {
    if (required) parse_fail(source, line, std::string(column) + " is required");
    return std::nullopt;
  }
  if (text == "0") return false;
  if (text == "1") return true;
  parse_fail(source, line, std::string(column) + " must be 0 or 1, got '" + text + "'");
}

std::optional<double> parse_score(const std::string& text, const std::string& source, std::size_t line) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    parse_fail(source, line, "score '" + text + "' is not a number");
  }
  if (value < 0.0 || value > 1.0) parse_fail(source, line, "score " + text + " outside [0,1]");
  return value;
}

std::string flag_text(const std::optional<bool>& v) {
  if (!v) return "";
  return *v ? "1" : "0";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, end);
}

Dataset parse_dataset(std::istream& in, const std::string& source_name) {
  Dataset ds;
  ds.info.path = source_name;

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, source_name + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_fields(line);

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!column.emplace(header[i], i).second) {
      throw Error(ErrorCode::SchemaError, source_name + ": duplicate column '" + header[i] + "'");
    }
  }
  for (const char* required : {"id", "y", "y_hat"}) {
    if (!column.count(required)) {
      throw Error(ErrorCode::SchemaError, source_name + ": missing required column '" + required + "'");
    }
  }
  auto index_of = [&column](const char* name) -> std::optional<std::size_t> {
    const auto it = column.find(name);
    if (it == column.end()) return std::nullopt;
    return it->second;
  };
  const std::size_t id_col = column["id"];
  const std::size_t y_col = column["y"];
  const std::size_t y_hat_col = column["y_hat"];
  const auto a_col = index_of("a");
  const auto a_hat_col = index_of("a_hat");
  const auto score_col = index_of("score");

  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != header.size()) {
      parse_fail(source_name, line_no,
                 "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    }
    PredictionRecord rec;
    rec.id = f[id_col];
    if (rec.id.empty()) parse_fail(source_name, line_no, "id is empty");
    if (!seen.insert(rec.id).second) parse_fail(source_name, line_no, "duplicate id '" + rec.id + "'");
    rec.y = *parse_flag(f[y_col], "y", true, source_name, line_no);
    rec.y_hat = *parse_flag(f[y_hat_col], "y_hat", true, source_name, line_no);
    if (a_col) rec.a = parse_flag(f[*a_col], "a", false, source_name, line_no);
    if (a_hat_col) rec.a_hat = parse_flag(f[*a_hat_col], "a_hat", false, source_name, line_no);
    if (score_col) rec.score = parse_score(f[*score_col], source_name, line_no);

    ds.info.has_a = ds.info.has_a || rec.a.has_value();
    ds.info.has_a_hat = ds.info.has_a_hat || rec.a_hat.has_value();
    ds.info.has_score = ds.info.has_score || rec.score.has_value();
    ds.records.push_back(std::move(rec));
  }
  ds.info.record_count = ds.records.size();
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path.string() + ": cannot open");
  Dataset ds = parse_dataset(in, path.string());
  ds.info.path = path;
  return ds;
}

void write_dataset(std::ostream& out, const std::vector<PredictionRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& rec : records) {
    if (rec.id.find(',') != std::string::npos || rec.id.find('\n') != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "id '" + rec.id + "' contains a delimiter");
    }
    out << rec.id << ',' << (rec.y ? '1' : '0') << ',' << (rec.y_hat ? '1' : '0') << ',' << flag_text(rec.a) << ','
        << flag_text(rec.a_hat) << ',' << (rec.score ? format_double(*rec.score) : std::string()) << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const std::vector<PredictionRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, path.string() + ": cannot open for writing");
  write_dataset(out, records);
}

Partitions split_dataset(const std::vector<PredictionRecord>& records, const SplitSpec& spec) {
  const std::size_t n = records.size();
  std::array<std::size_t, 3> counts{};
  if (const auto* c = std::get_if<std::array<std::size_t, 3>>(&spec.sizes)) {
    counts = *c;
    const std::size_t sum = counts[0] + counts[1] + counts[2];
    if (sum != n) {
      throw Error(ErrorCode::InfeasibleSplit, "counts sum to " + std::to_string(sum) + " but input has " +
                                                  std::to_string(n) + " records");
    }
  } else {
    const auto& frac = std::get<std::array<double, 3>>(spec.sizes);
    double sum = 0.0;
    for (const double v : frac) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InfeasibleSplit, "fractions must lie in [0,1]");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw Error(ErrorCode::InfeasibleSplit, "fractions must sum to 1");
    counts[0] = static_cast<std::size_t>(std::llround(frac[0] * static_cast<double>(n)));
    counts[1] = std::min(n - counts[0], static_cast<std::size_t>(std::llround(frac[1] * static_cast<double>(n))));
    counts[2] = n - counts[0] - counts[1];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  Partitions parts;
  std::size_t cursor = 0;
  for (std::size_t p = 0; p < 3; ++p) {
    parts[p].reserve(counts[p]);
    for (std::size_t k = 0; k < counts[p]; ++k) parts[p].push_back(records[order[cursor++]]);
  }
  return parts;
}

void write_scan_csv(std::ostream& out, const theory::GammaScan& scan) {
  out << "g1,g2,gamma\n";
  for (const auto& p : scan.points) {
    out << format_double(p.g1) << ',' << format_double(p.g2) << ',' << format_double(p.gamma) << '\n';
  }
}

}  // namespace proxybias::io
