#pragma once

#include <optional>
#include <string>

namespace proxybias {

/// One example as seen by an auditor. `y` and `y_hat` are always known;
/// the true attribute `a` is usually hidden and `a_hat` comes from the
/// attribute classifier. `true` encodes the positive label and group a=1.
struct PredictionRecord {
  std::string id;
  bool y = false;
  bool y_hat = false;
  std::optional<bool> a_hat;
  std::optional<bool> a;
  /// Attribute-classifier confidence that a=1, in [0,1].
  std::optional<double> score;

  bool operator==(const PredictionRecord&) const = default;
};

/// Throws Error(InvalidArgument) when the score lies outside [0,1] or is NaN.
void validate(const PredictionRecord& record);

}  // namespace proxybias
