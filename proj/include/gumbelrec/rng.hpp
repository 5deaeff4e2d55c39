// SPDX-License-Identifier: Apache-2.0
//
// Deterministic RNG used everywhere in the library: xoshiro256** seeded via
// splitmix64. Streams for independent purposes are derived from a base seed
// plus stream keys, so adding a consumer never shifts the draws of another.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>

namespace gumbelrec {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  using state_type = std::array<std::uint64_t, 4>;

  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  // Derives an independent stream from (seed, key...). Mixing each key
  // through splitmix64 keeps nearby keys uncorrelated.
  template <class... Keys>
  static Rng stream(std::uint64_t seed, Keys... keys) {
    std::uint64_t x = seed;
    (void)std::initializer_list<int>{(x = splitmix64(x) ^ static_cast<std::uint64_t>(keys), 0)...};
    return Rng(splitmix64(x));
  }

  std::uint64_t next_u64() {
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): 53-bit mantissa shifted off zero.
  // Safe to feed through log(-log(u)) without hitting a pole.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  const state_type& state() const { return s_; }
  void set_state(const state_type& s) {
    s_ = s;
    have_spare_ = false;
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  state_type s_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gumbelrec
