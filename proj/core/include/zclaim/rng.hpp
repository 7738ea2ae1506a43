#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace zclaim {

/// The simulation RNG. mt19937_64 is specified bit-exactly by the standard,
/// unlike the std distributions, so all draws go through the helpers below.
using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi] by rejection sampling; platform independent.
inline std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return rng();
  const std::uint64_t n = span + 1;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x > limit);
  return lo + x % n;
}

/// True with probability num/den.
inline bool bernoulli(Rng& rng, std::uint64_t num, std::uint64_t den) {
  return uniform_int(rng, 0, den - 1) < num;
}

template <std::size_t N>
std::array<std::uint8_t, N> random_bytes(Rng& rng) {
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; i += 8) {
    std::uint64_t w = rng();
    for (std::size_t j = i; j < N && j < i + 8; ++j) {
      out[j] = static_cast<std::uint8_t>(w);
      w >>= 8;
    }
  }
  return out;
}

}  // namespace zclaim
