#include <immintrin.h>

#include <algorithm>
#include <cstddef>

#include "distortion_point.hpp"
#include "proxybias/kernels.hpp"

namespace proxybias::kernels::avx2 {

namespace {

// 8-bit lane counters overflow after 255 increments, so blocks are capped.
constexpr std::size_t kLanes = 32;
constexpr std::size_t kBlockVectors = 255;

std::uint64_t horizontal_sum_epu8(__m256i counters) {
  const __m256i sums = _mm256_sad_epu8(counters, _mm256_setzero_si256());
  alignas(32) std::uint64_t parts[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(parts), sums);
  return parts[0] + parts[1] + parts[2] + parts[3];
}

}  // namespace

CellCounts tally_cells(std::span<const std::uint8_t> codes) {
  CellCounts counts{};
  const std::uint8_t* data = codes.data();
  std::size_t remaining = codes.size();

  while (remaining >= kLanes) {
    const std::size_t vectors = std::min(kBlockVectors, remaining / kLanes);
    __m256i acc[16];
    for (auto& a : acc) a = _mm256_setzero_si256();
    for (std::size_t v = 0; v < vectors; ++v) {
      const __m256i block = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + v * kLanes));
      for (int c = 0; c < 16; ++c) {
        // cmpeq yields 0xFF (= -1) on match; subtracting increments the lane.
        const __m256i hit = _mm256_cmpeq_epi8(block, _mm256_set1_epi8(static_cast<char>(c)));
        acc[c] = _mm256_sub_epi8(acc[c], hit);
      }
    }
    for (int c = 0; c < 16; ++c) counts[c] += horizontal_sum_epu8(acc[c]);
    data += vectors * kLanes;
    remaining -= vectors * kLanes;
  }
  for (std::size_t i = 0; i < remaining; ++i) {
    if (data[i] < 16) ++counts[data[i]];
  }
  return counts;
}

void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out) {
  const double s_over_r = s / r;
  const double r_over_s = r / s;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d sr = _mm256_set1_pd(s_over_r);
  const __m256d rs = _mm256_set1_pd(r_over_s);

  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(g1.data() + i);
    const __m256d b = _mm256_loadu_pd(g2.data() + i);
    const __m256d one_minus_a = _mm256_sub_pd(one, a);
    const __m256d one_minus_b = _mm256_sub_pd(one, b);
    const __m256d num = _mm256_andnot_pd(sign, _mm256_sub_pd(one_minus_a, b));
    const __m256d f1 = _mm256_add_pd(_mm256_mul_pd(sr, one_minus_a), b);
    const __m256d f2 = _mm256_add_pd(_mm256_mul_pd(rs, one_minus_b), a);
    const __m256d q = _mm256_div_pd(num, _mm256_mul_pd(f1, f2));
    const __m256d vanish = _mm256_cmp_pd(num, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(q, zero, vanish));
  }
  for (; i < n; ++i) {
    out[i] = detail::distortion_point(g1[i], g2[i], s_over_r, r_over_s);
  }
}

}  // namespace proxybias::kernels::avx2
