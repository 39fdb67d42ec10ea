#pragma once

#include <cstdint>
#include <random>

namespace tableqa {

/// Seeded generator with hand-rolled draws so streams are identical across
/// standard library implementations.
struct Rng {
  std::mt19937_64 g;

  explicit Rng(uint64_t seed) : g(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(g() >> 11) * (1.0 / 9007199254740992.0);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  uint64_t integer(uint64_t n) { return n == 0 ? 0 : g() % n; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[integer(i)]);
  }
};

}  // namespace tableqa
