#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "proxybias/record.hpp"

namespace proxybias {

/// Which attribute axes a table carries. A table built from one source
/// collapses the other axis onto its `false` slot.
enum class AttributeSource { TrueA, PredictedA, Both };

std::string to_string(AttributeSource source);

inline constexpr std::size_t kCellCount = 16;

/// Cell layout: bit 3 = y, bit 2 = a, bit 1 = y_hat, bit 0 = a_hat.
constexpr std::uint8_t cell_index(bool y, bool a, bool y_hat, bool a_hat) noexcept {
  return static_cast<std::uint8_t>((y << 3) | (a << 2) | (y_hat << 1) | (a_hat << 0));
}

/// Conjunction of per-axis constraints; an empty optional leaves that axis free.
struct Event {
  std::optional<bool> y;
  std::optional<bool> a;
  std::optional<bool> y_hat;
  std::optional<bool> a_hat;

  bool contains(std::size_t cell) const noexcept;
  Event operator&(const Event& other) const;
  std::string describe() const;
};

/// Mass over the 16 (y, a, y_hat, a_hat) cells. Immutable once built; every
/// conditional probability used by the estimators is a ratio of cell sums.
class JointTable {
 public:
  using Cells = std::array<double, kCellCount>;

  /// Throws InvalidArgument for negative or non-finite mass, EmptyInput for
  /// zero total, and InvalidArgument when a collapsed axis holds mass in its
  /// `true` slot.
  JointTable(const Cells& cells, AttributeSource axes);

  const Cells& cells() const noexcept { return cells_; }
  double cell(bool y, bool a, bool y_hat, bool a_hat) const noexcept {
    return cells_[cell_index(y, a, y_hat, a_hat)];
  }
  double total() const noexcept { return total_; }
  AttributeSource axes() const noexcept { return axes_; }
  bool has_true_attribute() const noexcept { return axes_ != AttributeSource::PredictedA; }
  bool has_predicted_attribute() const noexcept { return axes_ != AttributeSource::TrueA; }

  /// Sum of cells inside `event`. Throws MissingAxis when the event
  /// constrains an axis this table collapsed.
  double mass(const Event& event) const;
  double probability(const Event& event) const { return mass(event) / total_; }

  /// P(event | given). With `pseudo_count` c > 0 the estimate becomes
  /// (m(event, given) + c) / (m(given) + 2c), which is meant for binary
  /// outcomes. Throws MissingConditioningEvent when the smoothed
  /// denominator is zero.
  double conditional(const Event& event, const Event& given, double pseudo_count = 0.0) const;

  /// Same table scaled to total 1.
  JointTable normalized() const;

 private:
  void require_axes(const Event& event) const;

  Cells cells_{};
  double total_ = 0.0;
  AttributeSource axes_;
};

/// Packs a record into its 4-bit cell code; absent attribute axes encode as 0.
std::uint8_t encode_cell(const PredictionRecord& record, AttributeSource source);

/// Tallies exact counts. Throws EmptyInput for no records and
/// MissingField(id) when a record lacks an attribute the source requires.
JointTable build_joint_table(std::span<const PredictionRecord> records, AttributeSource source);

}  // namespace proxybias
