#pragma once

#include <cmath>
#include <cstdint>

namespace vseg {

// Counter-based random numbers built on the SplitMix64 finalizer. Every draw
// is a pure function of (seed, counter), so phantom volumes and initial
// weights do not depend on library RNG internals and can be regenerated
// bit-for-bit from a seed.

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double unit_open01(std::uint64_t h) {
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

// Uniform in [0, 1).
inline double unit_half_open01(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Standard normal deviate addressable by (seed, index). Random access, no
// state: used for per-voxel phantom noise.
inline double gaussian_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = mix64(seed ^ mix64(2 * index));
  const std::uint64_t b = mix64(seed ^ mix64(2 * index + 1));
  const double u1 = unit_open01(a);
  const double u2 = unit_half_open01(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Sequential draws over an incrementing counter. Same seed, same stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ ^ mix64(counter_++)); }

  double uniform01() { return unit_half_open01(next_u64()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  double normal() {
    const double u1 = unit_open01(next_u64());
    const double u2 = unit_half_open01(next_u64());
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace vseg
