#pragma once

#include <cstdint>
#include <string_view>

#include "geoexp/common.hpp"

namespace geoexp {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent sub-stream seed from a master seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

/// Key for a point-dependent stream: the point is quantized to 2^-40 so that the
/// stream depends only on (seed, x) and never on call order or thread.
std::uint64_t point_key(std::uint64_t seed, const Vec3& x) noexcept;

/// Counter-based generator: the k-th draw is a pure function of (key, k).
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in the closed unit ball (rejection sampling).
  Vec3 in_unit_ball() noexcept;

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace geoexp
