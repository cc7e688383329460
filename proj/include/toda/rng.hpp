#pragma once

// Small deterministic PRNG (xorshift64*).  Test suites and the CLI need
// reproducible pseudo-random diagrams across platforms, which rules out
// std::mt19937 seeded through std::random_device and the distribution
// wrappers (their output is implementation-defined).

#include <cstdint>
#include <vector>

namespace toda {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : state(seed ? seed : 1) {}

  std::uint64_t next() {
    std::uint64_t x = state;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  // Uniform value in [0, k); k must be positive.
  std::uint64_t below(std::uint64_t k) { return next() % k; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(below(v.size()))];
  }
};

}  // namespace toda
