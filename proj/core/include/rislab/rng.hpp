#pragma once

#include <cstddef>
#include <cstdint>

#include "rislab/numerics.hpp"

namespace rislab {

/// SplitMix64 generator: a 64-bit Weyl counter (increment 0x9E3779B97F4A7C15)
/// fed through a fixed avalanche mix. Every draw below is defined in terms of
/// next_u64() so runs replay bit-exactly across platforms and standard
/// libraries (no std:: distributions are involved).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  /// Standard normal via the Box-Muller transform. The second variate of each
  /// pair is cached.
  double normal();

  /// Independent child stream; `stream` distinguishes siblings.
  SeededRng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// n i.i.d. circularly-symmetric complex Gaussians CN(0, variance).
CVector sample_cn(SeededRng& rng, double variance, std::size_t n);

}  // namespace rislab
