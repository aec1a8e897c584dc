#pragma once

#include <cstdint>

namespace vigil {

/// SplitMix64. Fixed algorithm so seeded runs are identical on every
/// platform; the host library's default engine is never used.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], inclusive.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    return lo + next() % (hi - lo + 1);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Approximately standard normal via the sum of 12 uniforms. Uses only
  /// IEEE add/multiply, so results are bit-stable across platforms (no libm).
  double gaussianish() {
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) sum += uniform01();
    return sum - 6.0;
  }

 private:
  std::uint64_t state_;
};

}  // namespace vigil
