#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "proxybias/record.hpp"
#include "proxybias/theory.hpp"

namespace proxybias::io {

inline constexpr int kSchemaVersion = 1;

/// Column layout written by write_dataset; readers accept any column order.
inline constexpr const char* kCsvHeader = "id,y,y_hat,a,a_hat,score";

struct DatasetFile {
  std::filesystem::path path;
  int schema_version = kSchemaVersion;
  std::size_t record_count = 0;
  bool has_a = false;      ///< column present and at least one value set
  bool has_a_hat = false;
  bool has_score = false;
};

struct Dataset {
  DatasetFile info;
  std::vector<PredictionRecord> records;
};

/// CSV with header; id, y, y_hat required; a, a_hat, score optional and may
/// be blank per row. Labels are 0/1, score a decimal in [0,1]. Unknown
/// columns are ignored. Throws Error(ParseError) with the line number,
/// Error(SchemaError) for a missing or duplicated column.
Dataset read_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::istream& in, const std::string& source_name = "<stream>");

void write_dataset(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_dataset(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);

/// Partition sizes for (unused/training, evaluation, common data). Counts
/// must sum to the input size; fractions must sum to 1 and are rounded.
struct SplitSpec {
  std::variant<std::array<std::size_t, 3>, std::array<double, 3>> sizes;
  std::uint64_t seed = 0;
};

using Partitions = std::array<std::vector<PredictionRecord>, 3>;

/// Seeded shuffle, then contiguous slices. Throws Error(InfeasibleSplit).
Partitions split_dataset(const std::vector<PredictionRecord>& records, const SplitSpec& spec);

/// Columns g1,g2,gamma.
void write_scan_csv(std::ostream& out, const theory::GammaScan& scan);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace proxybias::io
