#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fastfrechet {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used only to derive
/// independent stream seeds; the streams themselves are std::mt19937_64,
/// whose output sequence is fixed by the C++ standard.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded stream identified by (seed, stream id). Streams for different ids
/// are independent of the order in which they are created, so replicate b
/// always sees the same numbers regardless of scheduling.
///
/// All distributions are implemented here rather than with <random>
/// distribution classes, whose algorithms are implementation-defined.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream_id))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  /// k distinct indices from 0..n-1 drawn uniformly, returned sorted.
  std::vector<std::size_t> subsample(std::size_t n, std::size_t k);

  /// Standard normal via Box-Muller (one draw per call; the pair's
  /// second value is discarded).
  double normal();

private:
  std::mt19937_64 engine_;
};

}  // namespace fastfrechet
