#pragma once

#include <cstdint>

namespace hetsurr {

/// SplitMix64 finalizer (Stafford variant 13): a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Key of an independent random stream:
///   k = mix64(mix64(mix64(master + C0) ^ (replication * C1 + C2)) ^ (tag * C3 + C4))
/// with C0 = 0x9E3779B97F4A7C15, C1 = 0xD1B54A32D192ED03, C2 = 0x8CB92BA72F3D8DD7,
/// C3 = 0xABC98388FB8FAC03, C4 = 0xDB4F0B9175AE2165. Streams depend only on
/// (master, replication, tag), never on evaluation order or thread count.
constexpr std::uint64_t derive_stream_key(std::uint64_t master, std::uint64_t replication,
                                          std::uint64_t tag) noexcept {
  std::uint64_t k = mix64(master + 0x9E3779B97F4A7C15ULL);
  k = mix64(k ^ (replication * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return mix64(k ^ (tag * 0xABC98388FB8FAC03ULL + 0xDB4F0B9175AE2165ULL));
}

/// Counter-based SplitMix64 stream: the i-th raw output is
/// mix64(key + (i + 1) * 0x9E3779B97F4A7C15). Variates are built from raw
/// outputs only, with no platform-specific distribution code:
///   uniform  ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
///   normal   inverse standard-normal CDF of one uniform
///   gamma    Marsaglia-Tsang squeeze/rejection on the normal and uniform above
class RandomStream {
 public:
  explicit constexpr RandomStream(std::uint64_t key) noexcept : key_(key) {}
  RandomStream(std::uint64_t master, std::uint64_t replication, std::uint64_t tag) noexcept
      : key_(derive_stream_key(master, replication, tag)) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double variance);
  /// Gamma with the given shape and scale (mean = shape * scale).
  double gamma(double shape, double scale);

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hetsurr
