#include "geoexp/implicit.hpp"

#include <cmath>
#include <sstream>

#include "geoexp/random.hpp"

namespace geoexp {

Vec3 ImplicitSurface::gradient(const Vec3& x) const {
  constexpr double h = kGradientStep;
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 a = x, b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (value(a) - value(b)) / (2.0 * h);
  }
  return g;
}

void SmoothingConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "smoothing epsilon must be positive");
  if (sample_count < 1) throw Error(ErrorCode::InvalidConfig, "smoothing sample_count must be >= 1");
}

void ProjectionConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "projection tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidConfig, "projection max_iterations must be >= 1");
}

Vec3 smoothed_gradient(const ImplicitSurface& surface, const Vec3& x, const SmoothingConfig& cfg) {
  CounterRng rng(point_key(cfg.seed, x));
  Vec3 sum = Vec3::Zero();
  for (int k = 0; k < cfg.sample_count; ++k) {
    sum += surface.raw_gradient(x + cfg.epsilon * rng.in_unit_ball());
  }
  return sum / static_cast<double>(cfg.sample_count);
}

namespace {

Vec3 unit_or_throw(const Vec3& g, const Vec3& x) {
  const double norm = g.norm();
  if (!(norm > 1e-12)) {
    std::ostringstream os;
    os << "gradient norm " << norm << " at (" << x.x() << ", " << x.y() << ", " << x.z() << ")";
    throw Error(ErrorCode::DegenerateGradient, os.str());
  }
  return g / norm;
}

} // namespace

Vec3 normal(const ImplicitSurface& surface, const Vec3& x, const SmoothingConfig& cfg) {
  return unit_or_throw(smoothed_gradient(surface, x, cfg), x);
}

Vec3 project(const ImplicitSurface& surface, const Vec3& x, const ProjectionConfig& cfg,
             const SmoothingConfig& smoothing, GradientMode mode) {
  Vec3 cur = x;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double f = surface.eval(cur);
    if (!std::isfinite(f)) break;
    if (std::abs(f) <= cfg.tolerance) return cur;
    const Vec3 g = mode == GradientMode::Smoothed ? smoothed_gradient(surface, cur, smoothing)
                                                  : surface.raw_gradient(cur);
    const double g2 = g.squaredNorm();
    if (!(g2 > 1e-24)) break;
    cur -= (f / g2) * g;
  }
  if (std::abs(surface.eval(cur)) <= cfg.tolerance) return cur;
  std::ostringstream os;
  os << "projection from (" << x.x() << ", " << x.y() << ", " << x.z() << ") after "
     << cfg.max_iterations << " iterations";
  throw Error(ErrorCode::NoConvergence, os.str());
}

Vec3 SurfaceView::gradient(const Vec3& x) const {
  return mode == GradientMode::Smoothed ? smoothed_gradient(*surface, x, smoothing)
                                        : surface->raw_gradient(x);
}

Vec3 SurfaceView::normal(const Vec3& x) const { return unit_or_throw(gradient(x), x); }

Vec3 SurfaceView::project(const Vec3& x) const {
  return geoexp::project(*surface, x, projection, smoothing, mode);
}

} // namespace geoexp
