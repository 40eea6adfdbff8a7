#pragma once
// Exact integer powers of a 0/1 polynomial by number-theoretic transforms
// over three NTT-friendly primes, recombined with Garner's CRT.

#include <cstdint>
#include <vector>

namespace sumprod::detail {

/// Largest transform length supported by all three moduli.
inline constexpr std::size_t kMaxNttLength = std::size_t{1} << 25;

/// log2 of the CRT modulus product; coefficients must stay below 2^86.
inline constexpr double kNttCoefficientBits = 86.0;

/// Coefficients of (sum_{i in support} x^i)^h, where support holds distinct
/// non-negative offsets. The caller guarantees h * max(support) + 1 <=
/// kMaxNttLength and N^h < 2^86.
std::vector<unsigned __int128> indicator_power(const std::vector<std::uint32_t>& support,
                                               std::uint32_t max_offset, int h);

}  // namespace sumprod::detail
