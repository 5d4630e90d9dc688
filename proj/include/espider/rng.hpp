#ifndef ESPIDER_RNG_HPP
#define ESPIDER_RNG_HPP

#include <cmath>
#include <cstdint>

namespace espider {

/// SplitMix64 counter generator (Steele, Lea & Flood's finalizer over a
/// golden-gamma counter). Chosen so campaigns are reproducible across
/// implementations: run i of a campaign draws from the stream whose
/// initial counter is mix(seed) ^ mix(i + 1). Transforms below
/// (uniform from the top 53 bits, inversion exponential, Box-Muller
/// normal) are part of the reproducibility contract and documented here
/// rather than delegated to library distributions, which are not
/// specified bit-exactly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Stream for run `i` of a campaign with master seed `seed`.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t i) {
    SplitMix64 r(mix(seed) ^ mix(i + 1));
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1): top 53 bits, offset by half an ulp so 0 is
  /// excluded (safe for log transforms).
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with the given rate by inversion.
  double next_exponential(double rate) { return -std::log(next_double()) / rate; }

  /// Standard normal by Box-Muller (both deviates used, one cached).
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_double(), u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  /// Index in [0, n) from weights[0..n): linear scan of the cumulative.
  template <typename Vec>
  int next_categorical(const Vec& weights, int n, double total) {
    double u = next_double() * total;
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace espider

#endif
