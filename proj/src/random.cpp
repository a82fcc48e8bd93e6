#include "geoexp/random.hpp"

#include <algorithm>
#include <cmath>

namespace geoexp {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  // FNV-1a over the label, then mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(seed ^ mix64(h));
}

namespace {

std::uint64_t quantize(double v) noexcept {
  constexpr double kLimit = 0x1.0p62;
  double scaled = std::ldexp(v, 40);
  scaled = std::clamp(scaled, -kLimit, kLimit);
  return static_cast<std::uint64_t>(std::llround(scaled));
}

} // namespace

std::uint64_t point_key(std::uint64_t seed, const Vec3& x) noexcept {
  std::uint64_t k = mix64(seed);
  for (int i = 0; i < 3; ++i) k = mix64(k ^ quantize(x[i]));
  return k;
}

Vec3 CounterRng::in_unit_ball() noexcept {
  for (;;) {
    Vec3 v(2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0);
    if (v.squaredNorm() <= 1.0) return v;
  }
}

} // namespace geoexp
