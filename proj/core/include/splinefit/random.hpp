#pragma once

#include <cstdint>
#include <random>

namespace splinefit {

using Rng = std::mt19937_64;

// splitmix64 finalizer; sub-seed k of a master seed is mix_seed(seed + k).
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum class SeedStream : std::uint64_t { Split = 0, Band = 1 };

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) noexcept {
  return mix_seed(master + static_cast<std::uint64_t>(stream));
}

// Uniform integer in [0, bound) by rejection; identical across standard libraries.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound) - 1;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw > limit);
  return draw % bound;
}

}  // namespace splinefit
