#pragma once

#include <cstdint>

namespace dfcal {

/// Counter-based generator: the i-th draw of stream `s` under seed `k` is a
/// pure function of (k, s, i), so experiments are reproducible bit-for-bit
/// across runs, platforms and thread schedules. The mixing function is the
/// SplitMix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform on (0, 1); safe to feed into inverse CDFs with poles at 0 or 1.
  double uniform_open();

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dfcal
