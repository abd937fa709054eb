#pragma once

#include <cstdint>
#include <vector>

namespace musobench {

// Seedable, portable random generator: xoshiro256** seeded through
// SplitMix64. All corpus generation flows through this type so that a
// (params, seed) pair yields the same instance on every platform.
//
// Stream splitting: child seeds are derived as
//   derive_seed(root, index) = mix64(mix64(root + GOLDEN * (index + 1)))
// where mix64 is the SplitMix64 finalizer. Each corpus attempt index gets
// its own stream, which keeps parallel generation deterministic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Unbiased draw from [0, n). n must be > 0.
  std::uint64_t bounded(std::uint64_t n);

  /// Inclusive-range draw. lo must be <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform in [0, 1) with 53 random bits.
  double next_double();

  /// True with probability p.
  bool bernoulli(double p);

  /// k distinct values from [0, n), ascending. k must be <= n.
  std::vector<int> sample_sorted(int n, int k);

 private:
  std::uint64_t state_[4];
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Per-index stream seed for parallel deterministic generation.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace musobench
