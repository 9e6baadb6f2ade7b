#pragma once

// Deterministic pseudo-random streams.
//
// The generator is xoshiro256** (Blackman & Vigna) seeded through splitmix64,
// both of which have published reference outputs. Everything here is
// integer arithmetic, so a seed replays bit-for-bit on any platform.

#include <array>
#include <cstdint>
#include <initializer_list>

namespace coppit {

inline constexpr std::uint64_t kDefaultSeed = 20140521ULL;

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// One-shot mixing of a single word.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  std::uint64_t s = x;
  return splitmix64(s);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t seed = kDefaultSeed) noexcept : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Independent sub-stream keyed by a path of integers below the master seed.
  // Rule: h0 = mix(seed); h_{i+1} = mix(h_i ^ mix(key_i + 0x632BE59BD9B4E019)).
  // Streams that differ in any path element share no structure beyond the
  // 2^-64 collision chance of the hash.
  static constexpr Rng substream(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t key : path) h = mix64(h ^ mix64(key + 0x632BE59BD9B4E019ULL));
    return Rng(h);
  }

  // Raw state, for checking against reference outputs.
  static constexpr Rng from_state(const std::array<std::uint64_t, 4>& state) noexcept {
    Rng r(0);
    r.s_ = state;
    return r;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1); safe to feed into logs and quantiles.
  constexpr double uniform_open() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi] by rejection (no modulo bias).
  constexpr std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    const std::uint64_t span = hi - lo;
    if (span == max()) return next();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = max() - max() % range;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return lo + x % range;
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace coppit
