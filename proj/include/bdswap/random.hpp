#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace bdswap {

// What a stream is used for. Part of the stream key so that two purposes
// sharing a seed and an index never see correlated draws.
enum class StreamPurpose : std::uint64_t {
  initial_state = 1,
  backward_event = 2,
  forward_event = 3,
  oracle = 4,
  test = 5,
  replication = 6,
};

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based generator keyed by (seed, purpose, index).
//
// The i-th draw of a stream is a pure function of (key, i), so streams for
// different event indices are independent of the order in which they are
// created. Extending a backward event log therefore never perturbs rows that
// were generated earlier. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index = 0) noexcept
      : key_(detail::splitmix64(detail::splitmix64(seed) ^
                                detail::splitmix64(static_cast<std::uint64_t>(purpose) * 0xd1b54a32d192ed03ULL) ^
                                detail::splitmix64(index * 0x8cb92ba72f3d8dd7ULL + 0x2545f4914f6cdd1dULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    return detail::splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate; rate 0 gives +inf.
  double exponential(double rate) noexcept {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log1p(-uniform()) / rate;
  }

  // Uniform index in [0, n); n must be positive.
  std::size_t index_below(std::size_t n) noexcept {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Derives a child seed, e.g. one per replication of an experiment.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return detail::splitmix64(detail::splitmix64(base) + index * 0x9e3779b97f4a7c15ULL);
}

}  // namespace bdswap
