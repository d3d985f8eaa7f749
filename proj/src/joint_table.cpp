#include "proxybias/joint_table.hpp"

#include <cmath>
#include <vector>

#include "proxybias/error.hpp"
#include "proxybias/kernels.hpp"

namespace proxybias {

namespace {

constexpr std::uint8_t kBitY = 1u << 3;
constexpr std::uint8_t kBitA = 1u << 2;
constexpr std::uint8_t kBitYHat = 1u << 1;
constexpr std::uint8_t kBitAHat = 1u << 0;

bool axis_matches(const std::optional<bool>& want, std::size_t cell, std::uint8_t bit) {
  return !want || *want == ((cell & bit) != 0);
}

std::optional<bool> merge_axis(const std::optional<bool>& lhs, const std::optional<bool>& rhs,
                               const char* axis) {
  if (lhs && rhs && *lhs != *rhs) {
    throw Error(ErrorCode::InvalidArgument, std::string("contradictory constraints on ") + axis);
  }
  return lhs ? lhs : rhs;
}

}  // namespace

std::string to_string(AttributeSource source) {
  switch (source) {
    case AttributeSource::TrueA: return "true";
    case AttributeSource::PredictedA: return "predicted";
    case AttributeSource::Both: return "both";
  }
  return "unknown";
}

bool Event::contains(std::size_t cell) const noexcept {
  return axis_matches(y, cell, kBitY) && axis_matches(a, cell, kBitA) &&
         axis_matches(y_hat, cell, kBitYHat) && axis_matches(a_hat, cell, kBitAHat);
}

Event Event::operator&(const Event& other) const {
  return Event{merge_axis(y, other.y, "y"), merge_axis(a, other.a, "a"),
               merge_axis(y_hat, other.y_hat, "y_hat"), merge_axis(a_hat, other.a_hat, "a_hat")};
}

std::string Event::describe() const {
  std::string out;
  auto add = [&out](const char* name, const std::optional<bool>& v) {
    if (!v) return;
    if (!out.empty()) out += ",";
    out += name;
    out += *v ? "=1" : "=0";
  };
  add("y", y);
  add("a", a);
  add("y_hat", y_hat);
  add("a_hat", a_hat);
  return out.empty() ? "(all)" : out;
}

JointTable::JointTable(const Cells& cells, AttributeSource axes) : cells_(cells), axes_(axes) {
  for (std::size_t i = 0; i < kCellCount; ++i) {
    const double m = cells_[i];
    if (!std::isfinite(m) || m < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "cell " + std::to_string(i) + " has invalid mass");
    }
    if (m > 0.0 && axes_ == AttributeSource::TrueA && (i & kBitAHat)) {
      throw Error(ErrorCode::InvalidArgument, "a_hat axis is collapsed but cell " + std::to_string(i) + " has mass");
    }
    if (m > 0.0 && axes_ == AttributeSource::PredictedA && (i & kBitA)) {
      throw Error(ErrorCode::InvalidArgument, "a axis is collapsed but cell " + std::to_string(i) + " has mass");
    }
    total_ += m;
  }
  if (!(total_ > 0.0)) throw Error(ErrorCode::EmptyInput, "joint table has no mass");
}

void JointTable::require_axes(const Event& event) const {
  if (event.a && !has_true_attribute()) {
    throw Error(ErrorCode::MissingAxis, "table has no true attribute axis");
  }
  if (event.a_hat && !has_predicted_attribute()) {
    throw Error(ErrorCode::MissingAxis, "table has no predicted attribute axis");
  }
}

double JointTable::mass(const Event& event) const {
  require_axes(event);
  double sum = 0.0;
  for (std::size_t i = 0; i < kCellCount; ++i) {
    if (event.contains(i)) sum += cells_[i];
  }
  return sum;
}

double JointTable::conditional(const Event& event, const Event& given, double pseudo_count) const {
  if (!(pseudo_count >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pseudo_count must be >= 0");
  const double denom = mass(given) + 2.0 * pseudo_count;
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::MissingConditioningEvent, "no mass on " + given.describe());
  }
  return (mass(event & given) + pseudo_count) / denom;
}

JointTable JointTable::normalized() const {
  Cells scaled = cells_;
  for (double& m : scaled) m /= total_;
  return JointTable(scaled, axes_);
}

std::uint8_t encode_cell(const PredictionRecord& record, AttributeSource source) {
  const bool need_a = source != AttributeSource::PredictedA;
  const bool need_a_hat = source != AttributeSource::TrueA;
  if (need_a && !record.a) throw Error(ErrorCode::MissingField, "record '" + record.id + "' has no a");
  if (need_a_hat && !record.a_hat) throw Error(ErrorCode::MissingField, "record '" + record.id + "' has no a_hat");
  return cell_index(record.y, need_a && *record.a, record.y_hat, need_a_hat && *record.a_hat);
}

JointTable build_joint_table(std::span<const PredictionRecord> records, AttributeSource source) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "no records");
  std::vector<std::uint8_t> codes;
  codes.reserve(records.size());
  for (const auto& record : records) codes.push_back(encode_cell(record, source));

  const kernels::CellCounts counts = kernels::tally_cells(codes);
  JointTable::Cells cells{};
  for (std::size_t i = 0; i < kCellCount; ++i) cells[i] = static_cast<double>(counts[i]);
  return JointTable(cells, source);
}

void validate(const PredictionRecord& record) {
  if (record.score && !(*record.score >= 0.0 && *record.score <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "record '" + record.id + "' has score outside [0,1]");
  }
}

}  // namespace proxybias
