#pragma once

// Seeded random streams. Every random quantity in the library is drawn from
// an Rng whose seed is derived from (run seed, purpose keys...), so results
// do not depend on thread scheduling. Conversions from raw 64-bit output are
// done here rather than through <random> distributions, whose algorithms are
// implementation defined.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace normdyn {

std::uint64_t splitmix64(std::uint64_t& state);

// Mixes a base seed with a sequence of stream keys (sample index, round...).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Unit-rate exponential.
  double exponential();
  // Uniform integer in [0, n), unbiased.
  std::size_t below(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Index drawn from a discrete distribution (weights sum to one).
  std::size_t categorical(std::span<const double> weights);
  double normal();

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace normdyn
