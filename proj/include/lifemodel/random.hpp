#pragma once

#include <cstdint>
#include <random>

namespace lifemodel {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` of run `run` under `master`; independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, std::uint64_t stream = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ run) + stream);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi_inclusive) {
  return std::uniform_int_distribution<int>(lo, hi_inclusive)(rng);
}

}  // namespace lifemodel
