#pragma once

#include <cstdint>

namespace rangekit {

// Counter-based generator built on the SplitMix64 output function
// (Steele, Lea & Flood; the mixer is Stafford's variant 13). The n-th
// output of a stream with key K is mix(K + (n+1)*GAMMA), which equals the
// n-th output of the classic stateful SplitMix64 seeded with K. Because
// each draw is a pure function of (key, counter), any draw can be computed
// independently of the others; Monte Carlo results are therefore identical
// no matter how trials are scheduled across threads.
//
// The full algorithm, stream-derivation rule and frozen test vectors live
// in docs/prng.md; tests/test_mc.cpp asserts them.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Stream key for (seed, purpose tag, substream, element). Chained
  // mixing keeps distinct tuples on effectively independent streams.
  static constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag,
                                            std::uint64_t substream, std::uint64_t element) {
    std::uint64_t k = mix(seed + kGamma);
    k = mix(k ^ (tag + kGamma));
    k = mix(k ^ (substream + kGamma));
    k = mix(k ^ (element + kGamma));
    return k;
  }

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr CounterRng(std::uint64_t seed, std::uint64_t tag, std::uint64_t substream,
                       std::uint64_t element)
      : key_(stream_key(seed, tag, substream, element)) {}

  constexpr std::uint64_t next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform double in [0, 1), 53 random bits.
  constexpr double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rangekit
