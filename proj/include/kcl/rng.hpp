#pragma once

#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace kcl {

// One splitmix64 step (Vigna's mixer).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Chain-hashes a master seed with context words (k, n, m, instance index, ...).
// Sweep workers use this to seed instances independently of execution order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> words) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t w : words) {
    state = out ^ w;
    out = splitmix64(state);
  }
  return out;
}

// Seeded source of uniform draws. Backed by std::mt19937_64, whose output
// sequence is pinned by the standard; the [0,bound) draw is rejection
// sampling on raw 64-bit words because std::uniform_int_distribution is
// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [0, bound); bound must be positive.
  std::uint32_t below(std::uint32_t bound) {
    assert(bound > 0);
    const std::uint64_t b = bound;
    for (;;) {
      const std::uint64_t r = engine_();
      const std::uint64_t v = r % b;
      // Accept only draws from a complete block of b values.
      if (r - v <= std::uint64_t(0) - b) return static_cast<std::uint32_t>(v);
    }
  }

  // One fair bit.
  bool bit() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kcl
