#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pgg/errors.hpp"

namespace pgg {

// splitmix64 finalizer; used to derive independent substream seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t substream_seed(uint64_t seed, uint64_t index) {
  return splitmix64(seed ^ splitmix64(index));
}

// Seeded generator with hand-rolled samplers. The engine (mt19937_64) and
// every transform below are fixed algorithms, so identical seeds produce
// identical streams on any conforming platform. std::*_distribution is
// deliberately avoided: its algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  // Independent stream for run/task `index`, reproducible from (seed, index).
  Rng substream(uint64_t index) const { return Rng(substream_seed(seed_, index)); }

  uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe under log().
  double uniform01_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  double exponential() { return -std::log(uniform01_open()); }

  // Geometric on {0, 1, 2, ...} with P(t) = p (1-p)^t, by inversion.
  int geometric(double p) {
    if (!(p > 0.0 && p < 1.0)) {
      throw_validation("InvalidProbability", "geometric parameter must lie in (0, 1)");
    }
    const double t = std::floor(std::log(uniform01_open()) / std::log1p(-p));
    return static_cast<int>(t);
  }

  // Gamma with integer shape (Erlang): sum of `shape` exponentials.
  double gamma_integer_shape(int shape, double scale) {
    double acc = 0.0;
    for (int i = 0; i < shape; ++i) acc += exponential();
    return acc * scale;
  }

  // Knuth multiplication method, split into chunks so the e^{-mean}
  // products stay normal; exact for any finite mean.
  int poisson(double mean) {
    if (!(mean >= 0.0)) {
      throw_numerical("NegativeMean", "Poisson mean must be nonnegative");
    }
    int count = 0;
    while (mean > kChunk) {
      count += poisson_chunk(kChunk);
      mean -= kChunk;
    }
    return count + poisson_chunk(mean);
  }

 private:
  static constexpr double kChunk = 500.0;

  int poisson_chunk(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform01_open();
    while (prod > limit) {
      ++k;
      prod *= uniform01_open();
    }
    return k;
  }

  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pgg
