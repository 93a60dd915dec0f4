#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "slfv/point.hpp"

namespace slfv {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer: a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Keyed counter hash. For a fixed key it is injective in the counter.
constexpr std::uint64_t hash_combine(std::uint64_t key, std::uint64_t counter) {
  return mix64(key ^ mix64(counter + kGolden));
}

// Counter-based generator: the n-th output is a pure function of (key, n).
// Models UniformRandomBitGenerator, but callers should use the helpers below
// rather than <random> distributions, whose output is library-specific.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  constexpr result_type operator()() { return mix64(key_ + kGolden * ++counter_); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(CounterRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1].
inline double uniform01_open_low(CounterRng& rng) { return 1.0 - uniform01(rng); }

inline double uniform(CounterRng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double exponential(CounterRng& rng, double rate) {
  return -std::log(uniform01_open_low(rng)) / rate;
}

inline bool bernoulli(CounterRng& rng, double p) { return uniform01(rng) < p; }

inline constexpr std::uint64_t max_multiple(std::uint64_t n) {
  return std::numeric_limits<std::uint64_t>::max() -
         std::numeric_limits<std::uint64_t>::max() % n;
}

inline std::uint64_t uniform_index(CounterRng& rng, std::uint64_t n) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = max_multiple(n);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

// Uniform point in the closed unit ball of R^d, by rejection from [-1,1]^d.
inline Point sample_unit_ball(CounterRng& rng, int d) {
  for (;;) {
    Point p;
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
      p[i] = 2.0 * uniform01(rng) - 1.0;
      r2 += p[i] * p[i];
    }
    if (r2 <= 1.0) return p;
  }
}

}  // namespace slfv
