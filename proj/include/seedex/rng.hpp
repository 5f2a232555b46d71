#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace seedex {

// SplitMix64 (Steele, Lea & Flood 2014) finalizer.
std::uint64_t splitmix64_mix(std::uint64_t z);

// Sub-stream key for (seed, purpose). Distinct tags give statistically
// independent streams; the mapping is fixed so results are identical on
// every platform:
//   key = mix(mix(seed) ^ fnv1a64(tag))
std::uint64_t derive_stream_key(std::uint64_t seed, std::string_view tag);

// A SplitMix64 stream. The state is a Weyl counter, so the i-th output is
// mix(key + (i + 1) * 0x9e3779b97f4a7c15) and does not depend on how other
// streams were consumed. Distributions are implemented here rather than via
// <random> because the standard distributions are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : state_(key) {}
  RandomStream(std::uint64_t seed, std::string_view tag)
      : state_(derive_stream_key(seed, tag)) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (one value per call; the pair's second
  // half is discarded to keep the stream position simple to reason about).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace seedex
