#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and,
// on x86-64, an AVX2 variant; the active variant is chosen once at startup
// from CPUID and can be overridden (tests run both and compare bitwise).

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace proxybias::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
Isa detected_isa() noexcept;
Isa active_isa() noexcept;
/// Throws proxybias::Error(InvalidArgument) when the CPU or build lacks `isa`.
void set_active_isa(Isa isa);

using CellCounts = std::array<std::uint64_t, 16>;

/// Histogram of 4-bit cell codes. Codes >= 16 are ignored.
CellCounts tally_cells(std::span<const std::uint8_t> codes);

/// Distortion factor evaluated pointwise at (g1[i], g2[i]) for fixed base
/// rates. Points where |1 - g1 - g2| is exactly zero yield 0, which is the
/// limit along any error-budget line through them. No range checks; callers
/// validate. All spans must have equal length.
void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out);

namespace scalar {
CellCounts tally_cells(std::span<const std::uint8_t> codes);
void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out);
}  // namespace scalar

namespace avx2 {
CellCounts tally_cells(std::span<const std::uint8_t> codes);
void distortion_batch(std::span<const double> g1, std::span<const double> g2, double r, double s,
                      std::span<double> out);
}  // namespace avx2

}  // namespace proxybias::kernels
