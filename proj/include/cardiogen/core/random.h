//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CORE_RANDOM_H_
#define CARDIOGEN_CORE_RANDOM_H_

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace cardiogen {

/// Counter-based generator: output i of stream s under seed k is a pure
/// function of (k, s, i). Independent streams can therefore be handed to
/// workers and replayed in any order.
///
/// All distributions are implemented here rather than via <random> so that
/// sequences are identical across standard library implementations.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) { }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    std::uint64_t x = seed_ ^ mix(stream_ + 0x9e3779b97f4a7c15ULL);
    x = mix(x + counter_ * 0xd1b54a32d192ed03ULL);
    ++counter_;
    return mix(x ^ 0x94d049bb133111ebULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) noexcept {
    if (n <= 1)
      return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  double normal() noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = uniform_int(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Generator for a derived stream; used to fan out independent streams.
  CounterRng split(std::uint64_t substream) const noexcept {
    return CounterRng(seed_, mix(stream_ * 0x9e3779b97f4a7c15ULL + substream
                                 + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace cardiogen

#endif  // CARDIOGEN_CORE_RANDOM_H_
