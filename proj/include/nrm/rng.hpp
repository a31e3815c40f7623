#pragma once

#include <cstdint>
#include <random>

namespace nrm {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replication `index` under `base_seed`.
///
/// base + (index + 1) * golden is injective in index (the multiplier is odd)
/// and mix64 is a bijection, so distinct indices never collide.
constexpr std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return mix64(base_seed + (index + 1) * 0xD1B54A32D192ED03ULL);
}

/// Stream engine. mt19937_64 output is fixed by the standard, so paths are
/// reproducible across compilers.
using Engine = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace nrm
