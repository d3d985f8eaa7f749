#pragma once

#include <doctest.h>

#include <optional>
#include <string>
#include <vector>

#include "proxybias/error.hpp"
#include "proxybias/record.hpp"

namespace test {

template <typename F>
proxybias::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const proxybias::Error& e) {
    return e.code();
  }
  FAIL("expected proxybias::Error");
  return proxybias::ErrorCode::InvalidArgument;
}

inline proxybias::PredictionRecord rec(std::string id, bool y, bool y_hat, std::optional<bool> a,
                                       std::optional<bool> a_hat, std::optional<double> score = std::nullopt) {
  proxybias::PredictionRecord r;
  r.id = std::move(id);
  r.y = y;
  r.y_hat = y_hat;
  r.a = a;
  r.a_hat = a_hat;
  r.score = score;
  return r;
}

}  // namespace test
