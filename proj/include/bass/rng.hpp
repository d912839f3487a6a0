#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bass {

using Rng = std::mt19937_64;

/// Deterministic sub-seed from a master seed and a label (FNV-1a + splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

/// Uniform in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace bass
