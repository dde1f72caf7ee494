#pragma once

#include <cmath>
#include <cstdint>

namespace elio::sim {

// Counter-based generator so fixtures are reproducible across languages.
// The full algorithm, normative for anything that reimplements it:
//
//   mix(seed, counter):
//     x = seed XOR (counter * 0x9E3779B97F4A7C15)   (mod 2^64)
//     x = (x XOR (x >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
//     x = (x XOR (x >> 27)) * 0x94D049BB133111EB    (mod 2^64)
//     return x XOR (x >> 31)
//
//   uniform(seed, counter)  = ((mix >> 11) + 1) / 2^53, in (0, 1]
//   gaussian(seed, counter) = sqrt(-2 ln u1) * cos(2 pi u2)
//     with u1 = uniform(seed, 2*counter), u2 = uniform(seed, 2*counter + 1)
//
// Derived streams are opened with substream(), which folds the stream id into
// a new seed through the same mixer.

inline std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t x = seed ^ (counter * 0x9E3779B97F4A7C15ULL);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform draw in (0, 1]; never returns 0, so it is log-safe.
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>((counter_mix(seed, counter) >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal draw (Box-Muller, cosine branch only).
inline double counter_gaussian(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = counter_uniform(seed, 2 * counter);
  const double u2 = counter_uniform(seed, 2 * counter + 1);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Seed of an independent derived stream (per scan, per beam, ...).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream_id) {
  return counter_mix(seed, 0x5851F42D4C957F2DULL + stream_id);
}

/// Sequential convenience wrapper over the counter primitives.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  double uniform() { return counter_uniform(seed_, counter_++); }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform() - 0x1.0p-53); }

  double gaussian() { return counter_gaussian(seed_, counter_++); }

  std::uint64_t next_u64() { return counter_mix(seed_, counter_++); }

  /// Integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace elio::sim
