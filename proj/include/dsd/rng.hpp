#pragma once

#include <cmath>
#include <cstdint>
#include <span>

// Seeded randomness used across the project. std::uniform_*_distribution is
// implementation-defined, so everything here is hand-rolled and fixed: runs
// with the same seed produce the same bytes on every platform.
namespace dsd::rng {

// SplitMix64 (Steele, Lea, Flood 2014).
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// Child seed for stream `index` of a master seed. Defined as one SplitMix64
// scramble of master + (index+1) * gamma. This is the documented seeding
// contract: sample i of a population, bootstrap rep r, and search trial t
// all draw from SplitMix64{derive_seed(seed, i)}.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 s{master + (index + 1) * 0x9E3779B97F4A7C15ull};
  return s.next();
}

// Uniform double in [0, 1), 53 mantissa bits.
inline double u01(SplitMix64& g) {
  return static_cast<double>(g.next() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Fixed-point multiply keeps the draw order and
// values platform-independent.
inline std::uint64_t below(SplitMix64& g, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(g.next()) * n) >> 64);
}

template <typename T>
const T& pick(SplitMix64& g, std::span<const T> values) {
  return values[below(g, values.size())];
}

// Continuous log-uniform draw over [lo, hi].
inline double log_uniform(SplitMix64& g, double lo, double hi) {
  const double a = std::log(lo);
  const double b = std::log(hi);
  return std::exp(a + (b - a) * u01(g));
}

}  // namespace dsd::rng
