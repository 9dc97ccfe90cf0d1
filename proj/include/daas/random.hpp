#pragma once

#include <cstdint>
#include <random>

namespace daas {

/// Seeded 64-bit Mersenne Twister that remembers how it was seeded.
///
/// Uniform variates are built from the top 53 bits of one engine output so
/// the stream is identical across standard library implementations. Normal
/// variates use std::normal_distribution and are reproducible for a given
/// standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Independent stream `stream` derived from `seed`.
  Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace daas
