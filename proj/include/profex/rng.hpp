#pragma once

#include <array>
#include <cstdint>

namespace profex {

// Philox 4x32-10 counter-based generator. A sample is addressed by
// (seed, stream, index), so any value can be produced without generating
// its predecessors; parallel consumers stay reproducible by construction.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Standard normal quantile function (inverse CDF), p in (0,1).
// Newton-refined complementary-error-function inversion, ~1 ulp.
double normal_quantile(double p);

// Mixes two 64-bit values into a sub-stream id (splitmix64 finalizer).
std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  // Uniform on the 2^53 midpoints of (0,1); never returns 0 or 1.
  double uniform() { return uniform_at(seed_, stream_, index_++); }
  double normal() { return normal_at(seed_, stream_, index_++); }
  // Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
  static double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace profex
