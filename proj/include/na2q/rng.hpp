#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace na2q {

// Deterministic xoshiro256++ stream. We avoid std:: distributions so that
// sequences are reproducible across standard library implementations, and so
// the full generator state (including the cached Box-Muller spare) can be
// serialized into checkpoints.
class Rng {
 public:
  Rng() : Rng(0x9e3779b97f4a7c15ull) {}

  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
    has_spare_ = false;
    spare_ = 0.0;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection-free modulo bias is negligible for
  // the small n used here, but we reject anyway to keep draws exact.
  int uniform_int(int n) {
    const uint64_t bound = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return static_cast<int>(v % bound);
  }

  // Standard normal via Box-Muller; the second sample of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

  // Derive an independent child stream from this stream's seed material and a
  // label. Used to give every consumer (init, exploration, replay sampling,
  // ...) its own sequence under one master seed.
  Rng split(std::string_view label, uint64_t index = 0) const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    uint64_t x = state_[0] ^ h;
    Rng child(0);
    for (auto& word : child.state_) word = splitmix64(x);
    child.has_spare_ = false;
    return child;
  }

  // State access for checkpointing.
  struct State {
    uint64_t s[4];
    uint8_t has_spare;
    double spare;
  };

  State save_state() const {
    State st;
    for (int i = 0; i < 4; ++i) st.s[i] = state_[i];
    st.has_spare = has_spare_ ? 1 : 0;
    st.spare = spare_;
    return st;
  }

  void load_state(const State& st) {
    for (int i = 0; i < 4; ++i) state_[i] = st.s[i];
    has_spare_ = st.has_spare != 0;
    spare_ = st.spare;
  }

 private:
  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
  bool has_spare_;
  double spare_;
};

}  // namespace na2q
