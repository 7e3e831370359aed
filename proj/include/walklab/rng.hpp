#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace walklab {

// SplitMix64: tiny counter-style generator, good enough for walk sampling and
// trivially reseedable per block.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t x) { return SplitMix64(x).next(); }

 private:
  std::uint64_t state_;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `hits` successes out of `n` trials.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ95) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  double lo = center - half;
  double hi = center + half;
  if (hits == 0) lo = 0.0;
  if (hits == n) hi = 1.0;
  return {lo < 0 ? 0.0 : lo, hi > 1 ? 1.0 : hi};
}

}  // namespace walklab
