#pragma once

#include <cstdint>
#include <random>

namespace pafit {

// Seeded random stream. All uniforms are produced from the raw engine output
// so that draw sequences are reproducible across standard-library versions;
// std::*_distribution is deliberately not used.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull) {}

  uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1)
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform in [a, b)
  double uniform(double a, double b) { return a + (b - a) * u01(); }

  // uniform integer in [0, n), n > 0
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return u01() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pafit
