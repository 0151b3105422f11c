#pragma once

#include <cmath>
#include <cstdint>

#include "casimir/constants.hpp"

namespace casimir {

// Counter-based generator: draw k is a pure function of (seed, k), so
// synthetic datasets are reproducible bit-for-bit regardless of evaluation
// order or worker count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1), draw index k.
  double uniform(std::uint64_t k) const {
    const std::uint64_t h = mix(seed_ + (k + 1) * 0x9E3779B97F4A7C15ull);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on draws (2i, 2i+1).
  double normal(std::uint64_t i) const {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::pi * u2);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace casimir
