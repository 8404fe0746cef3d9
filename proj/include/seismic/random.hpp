#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "seismic/errors.hpp"

namespace seismic {

// Deterministic random stream.  The distributions are generated by
// inversion/counting on top of mt19937_64 rather than through <random>'s
// distribution classes, whose output is implementation-defined; identical
// seeds therefore give identical draws on every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to feed into log().
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw domain_error("exponential: rate must be > 0");
    return -std::log(uniform_pos()) / rate;
  }

  // Counting method, split so the exp() never underflows for large means.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw domain_error("poisson: negative mean");
    std::uint64_t total = 0;
    while (mean > 500.0) {
      total += poisson_small(500.0);
      mean -= 500.0;
    }
    return total + poisson_small(mean);
  }

  // Geometric-skip counting; O(n*p + 1) draws.
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (p < 0.0 || p > 1.0) throw domain_error("binomial: p outside [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const double log1mp = std::log1p(-p);
    std::uint64_t count = 0;
    double i = -1.0;
    while (true) {
      i += 1.0 + std::floor(std::log(uniform_pos()) / log1mp);
      if (i >= static_cast<double>(n)) break;
      ++count;
    }
    return count;
  }

private:
  std::uint64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform_pos();
    while (prod > limit) {
      ++k;
      prod *= uniform_pos();
    }
    return k;
  }

  std::mt19937_64 gen_;
};

}  // namespace seismic
