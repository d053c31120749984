#pragma once

#include <cstdint>

namespace modcs {

/// Counter-based deterministic random stream.
///
/// Output i of a stream with key K is splitmix64_mix(K + (i + 1) * 0x9E3779B97F4A7C15),
/// i.e. the SplitMix64 sequence started from state K. A seed becomes a key via
/// one mix; substream(j) derives a child key from (parent key, j). Everything
/// here is fixed-width integer arithmetic, so streams are identical on every
/// platform and compiler. Never use std:: distributions on these values: their
/// algorithms are implementation-defined.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) noexcept : key_(mix(seed)) {}

  /// Independent child stream; the parent's position does not matter.
  SeededStream substream(std::uint64_t index) const noexcept {
    return SeededStream(Key{mix(key_ ^ mix(index + kSubstreamSalt))});
  }

  std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_unit();
  }

  /// Uniform integer in [0, bound); bound must be positive. Unbiased
  /// (rejects the short tail of the 64-bit range).
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// +1 or -1 with probability 1/2 each (top bit of one draw).
  int sign() noexcept { return (next_u64() >> 63) ? -1 : 1; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  struct Key {
    std::uint64_t value;
  };
  explicit SeededStream(Key k) noexcept : key_(k.value) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSubstreamSalt = 0xD1B54A32D192ED03ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Top-level substream tags. Each consumer of a master seed takes its own
/// tag so no two purposes share draws.
namespace stream_tag {
inline constexpr std::uint64_t kMatrix = 1;
inline constexpr std::uint64_t kQuadSampling = 2;
inline constexpr std::uint64_t kEmpirical = 3;
}  // namespace stream_tag

}  // namespace modcs
