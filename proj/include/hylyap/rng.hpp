#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hylyap {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed2019ULL;

/// Seeded generator with a platform-independent mapping to doubles.
///
/// std::mt19937_64 is fully specified by the standard; the distributions are
/// not, so uniform and normal variates are derived here from raw bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hylyap
