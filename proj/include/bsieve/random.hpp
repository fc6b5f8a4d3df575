#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bsieve {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive substream identifiers.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream.
///
/// A stream is addressed by (seed, id). Output block `k` of a stream is
/// philox(counter = {k, id}, key = seed), so any stream can be reproduced
/// from its address alone and `derive` produces statistically independent
/// child streams without touching the parent's position. Replicas, tree
/// nodes and ball throws all get their own derived stream, which is what
/// makes every experiment independent of how work is split across
/// threads.
class Stream {
 public:
  using result_type = std::uint32_t;

  explicit Stream(std::uint64_t seed, std::uint64_t id = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        id_(id) {}

  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(key_[0]) | (static_cast<std::uint64_t>(key_[1]) << 32);
  }
  std::uint64_t id() const { return id_; }

  /// Child stream addressed by `tag`; deterministic in (this->id, tag).
  Stream derive(std::uint64_t tag) const {
    return Stream(seed(), mix64(id_ ^ mix64(tag + 0x632BE59BD9B4E019ULL)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = (*this)();
    const std::uint64_t lo = (*this)();
    return (hi << 32) | lo;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential with unit mean.
  double exponential();

  /// Standard normal (Box-Muller, no caching so draws stay aligned to the counter).
  double normal();

  /// Gamma with the given shape and unit scale (Marsaglia-Tsang).
  double gamma(double shape);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
};

}  // namespace bsieve
