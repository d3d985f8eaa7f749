#pragma once

#include <cmath>

namespace proxybias::kernels::detail {

// Shared by the scalar kernel and the checked estimator so both round the
// same way. The AVX2 kernel mirrors this operation order lane by lane.
inline double distortion_point(double g1, double g2, double s_over_r, double r_over_s) noexcept {
  const double num = std::fabs((1.0 - g1) - g2);
  if (num == 0.0) return 0.0;
  const double f1 = s_over_r * (1.0 - g1) + g2;
  const double f2 = r_over_s * (1.0 - g2) + g1;
  return num / (f1 * f2);
}

}  // namespace proxybias::kernels::detail
