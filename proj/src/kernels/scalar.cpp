#include <cstddef>

#include "distortion_point.hpp"
#include "proxybias/kernels.hpp"

namespace proxybias::kernels::scalar {

CellCounts tally_cells(std::span<const std::uint8_t> codes) {
  CellCounts counts{};
  for (const std::uint8_t code : codes) {
    if (code < 16) ++counts[code];
  }
  return counts;
}

void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out) {
  const double s_over_r = s / r;
  const double r_over_s = r / s;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = detail::distortion_point(g1[i], g2[i], s_over_r, r_over_s);
  }
}

}  // namespace proxybias::kernels::scalar
