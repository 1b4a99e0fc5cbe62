#ifndef RED10_RANDOM_HPP_
#define RED10_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace red10 {

// The engine and trainers only draw through these helpers so that a seed
// reproduces the same stream on every standard library.
using Rng = std::mt19937_64;

// Uniform integer in [0, n) by rejection sampling.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Derives an independent stream seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace red10

#endif  // RED10_RANDOM_HPP_
