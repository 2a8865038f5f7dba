#pragma once

#include <array>
#include <cstdint>

namespace peplica {

// Deterministic generators with fixed integer arithmetic so fixtures are
// reproducible bit-for-bit across platforms and languages. No
// platform-default engines anywhere in the library.

/// SplitMix64 (Steele, Lea, Vigna). Used only to expand seeds into state.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256++ 1.0 (Blackman, Vigna). State seeded via SplitMix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  /// Stream `id` carves an independent substream out of one scenario seed.
  Xoshiro256pp(std::uint64_t seed, std::uint64_t stream_id)
      : Xoshiro256pp(seed + stream_id * 0x9E3779B97F4A7C15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform draw strictly inside (0,1): 53-bit mantissa, half-step offset.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the inverse CDF with Acklam's rational
  /// approximation (peak absolute error ~1.15e-9, fine for fixtures).
  double next_gaussian() { return inverse_normal_cdf(next_uniform()); }

  static double inverse_normal_cdf(double p);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace peplica
