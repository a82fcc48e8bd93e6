#include "geoexp/spline_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoexp/tridiagonal.hpp"

namespace geoexp {

PeriodicSpline::PeriodicSpline(std::vector<Vec3> values) : values_(std::move(values)) {
  const std::size_t m = values_.size();
  if (m < 3) throw Error(ErrorCode::DegenerateGrid, "periodic spline needs at least 3 knots");
  spacing_ = kTwoPi / static_cast<double>(m);
  const double scale = 6.0 / (spacing_ * spacing_);
  std::vector<Vec3> rhs(m);
  for (std::size_t i = 0; i < m; ++i)
    rhs[i] = scale * (values_[(i + 1) % m] - 2.0 * values_[i] + values_[(i + m - 1) % m]);
  const std::vector<double> off(m, 1.0), diag(m, 4.0);
  second_ = solve_cyclic_tridiagonal<Vec3>(off, diag, off, rhs);
}

Vec3 PeriodicSpline::operator()(double theta) const {
  const std::size_t m = values_.size();
  double x = std::fmod(theta, kTwoPi);
  if (x < 0.0) x += kTwoPi;
  std::size_t i = std::min(static_cast<std::size_t>(x / spacing_), m - 1);
  const double a = x - spacing_ * static_cast<double>(i);  // distance from knot i
  const double b = spacing_ - a;                           // distance to knot i+1
  const std::size_t k = (i + 1) % m;
  const double d = spacing_;
  return second_[i] * (b * b * b / (6.0 * d)) + second_[k] * (a * a * a / (6.0 * d)) +
         (values_[i] / d - second_[i] * (d / 6.0)) * b + (values_[k] / d - second_[k] * (d / 6.0)) * a;
}

NaturalSpline::NaturalSpline(double x0, double spacing, std::vector<Vec3> values)
    : x0_(x0), spacing_(spacing), values_(std::move(values)) {
  const std::size_t n = values_.size();
  if (n < 2) throw Error(ErrorCode::DegenerateGrid, "natural spline needs at least 2 knots");
  second_.assign(n, Vec3::Zero());
  if (n == 2) return;
  const std::size_t inner = n - 2;
  const double scale = 6.0 / (spacing_ * spacing_);
  std::vector<Vec3> rhs(inner);
  for (std::size_t k = 0; k < inner; ++k) rhs[k] = scale * (values_[k + 2] - 2.0 * values_[k + 1] + values_[k]);
  const std::vector<double> off(inner, 1.0), diag(inner, 4.0);
  const std::vector<Vec3> m = solve_tridiagonal<Vec3>(off, diag, off, rhs);
  std::copy(m.begin(), m.end(), second_.begin() + 1);
}

Vec3 NaturalSpline::operator()(double x) const {
  const std::size_t segments = values_.size() - 1;
  const double s = (x - x0_) / spacing_;
  const std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(segments - 1)));
  const double d = spacing_;
  const double a = x - (x0_ + d * static_cast<double>(i));
  const double b = d - a;
  return second_[i] * (b * b * b / (6.0 * d)) + second_[i + 1] * (a * a * a / (6.0 * d)) +
         (values_[i] / d - second_[i] * (d / 6.0)) * b + (values_[i + 1] / d - second_[i + 1] * (d / 6.0)) * a;
}

LocalMap LocalMap::fit(const TraceResult& trace) {
  const int m = trace.m();
  const int n = trace.complete_steps;
  if (m < 3) throw Error(ErrorCode::DegenerateGrid, "fewer than 3 radial curves");
  if (n < 1) throw Error(ErrorCode::DegenerateGrid, "no complete step");
  LocalMap map;
  map.frame_ = trace.frame;
  map.m_ = m;
  map.n_ = n;
  map.h_ = trace.params.h;
  map.radius_ = n * map.h_;
  map.offsets_.reserve(n);
  const Vec3& p = map.frame_.origin;
  for (int j = 1; j <= n; ++j) {
    std::vector<Vec3> offset(m);
    const double r = j * map.h_;
    for (int i = 0; i < m; ++i) {
      const double a = kTwoPi * i / m;
      offset[i] = trace.points[i][j] - (p + r * (std::cos(a) * map.frame_.e1 + std::sin(a) * map.frame_.e2));
    }
    map.offsets_.emplace_back(std::move(offset));
  }
  return map;
}

Vec3 LocalMap::isoline(int j, double theta) const {
  const double r = j * h_;
  return frame_.origin + r * (std::cos(theta) * frame_.e1 + std::sin(theta) * frame_.e2) + offsets_[j - 1](theta);
}

NaturalSpline LocalMap::radial_curve(double base) const {
  std::vector<Vec3> pts(2 * n_ + 1);
  pts[n_] = frame_.origin;
  const double opposite = base + kPi;
  for (int j = 1; j <= n_; ++j) {
    pts[n_ + j] = isoline(j, base);
    pts[n_ - j] = isoline(j, opposite);
  }
  return NaturalSpline(-n_ * h_, h_, std::move(pts));
}

namespace {

[[noreturn]] void out_of_disc(double r, double R) {
  std::ostringstream os;
  os << "radius " << r << " exceeds map radius " << R;
  throw Error(ErrorCode::OutOfDisc, os.str());
}

} // namespace

Vec3 LocalMap::eval_polar(double signed_r, double base) const {
  if (std::abs(signed_r) > radius_ + 1e-12) out_of_disc(std::abs(signed_r), radius_);
  if (signed_r == 0.0) return frame_.origin;
  return radial_curve(base)(std::clamp(signed_r, -radius_, radius_));
}

Vec3 LocalMap::eval(const Vec2& u) const {
  const double r = u.norm();
  if (r > radius_ + 1e-12) out_of_disc(r, radius_);
  if (r == 0.0) return frame_.origin;
  // Both halves of a diameter go through the same radial curve: the base angle
  // in [0, pi] is taken from whichever of u, -u lies in the upper half plane.
  const double theta = std::atan2(u.y(), u.x());
  if (theta < 0.0) return eval_polar(-r, std::atan2(-u.y(), -u.x()));
  return eval_polar(r, theta);
}

Vec3 eval_projected(const LocalMap& map, const SurfaceView& surface, const Vec2& u) {
  return surface.project(map.eval(u));
}

} // namespace geoexp
