#include <atomic>

#include "proxybias/error.hpp"
#include "proxybias/kernels.hpp"

namespace proxybias::kernels {

namespace {

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detected_isa()};
  return slot;
}

void require_equal_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || b != c) throw Error(ErrorCode::InvalidArgument, "distortion_batch span lengths differ");
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(PROXYBIAS_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() noexcept { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorCode::InvalidArgument, std::string("kernel ISA not available: ") + std::string(to_string(isa)));
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

CellCounts tally_cells(std::span<const std::uint8_t> codes) {
#if defined(PROXYBIAS_WITH_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::tally_cells(codes);
#endif
  return scalar::tally_cells(codes);
}

void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out) {
  require_equal_lengths(g1.size(), g2.size(), out.size());
#if defined(PROXYBIAS_WITH_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::distortion_batch(g1, g2, r, s, out);
#endif
  scalar::distortion_batch(g1, g2, r, s, out);
}

#if !defined(PROXYBIAS_WITH_AVX2)
// Non-x86 builds keep the avx2 namespace linkable; the dispatcher never picks it.
namespace avx2 {
CellCounts tally_cells(std::span<const std::uint8_t> codes) { return scalar::tally_cells(codes); }
void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out) {
  scalar::distortion_batch(g1, g2, r, s, out);
}
}  // namespace avx2
#endif

}  // namespace proxybias::kernels
