#pragma once

#include <vector>

#include "geoexp/tracer.hpp"

namespace geoexp {

/// Interpolating cubic spline with periodic end conditions over [0, 2 pi),
/// knots at 2 pi i / m.
class PeriodicSpline {
public:
  PeriodicSpline() = default;
  explicit PeriodicSpline(std::vector<Vec3> values);

  [[nodiscard]] Vec3 operator()(double theta) const;
  [[nodiscard]] int size() const { return static_cast<int>(values_.size()); }

private:
  std::vector<Vec3> values_;
  std::vector<Vec3> second_;
  double spacing_ = 0.0;
};

/// Natural cubic spline (zero second derivative at both ends) on uniform knots
/// x0 + k * spacing.
class NaturalSpline {
public:
  NaturalSpline() = default;
  NaturalSpline(double x0, double spacing, std::vector<Vec3> values);

  [[nodiscard]] Vec3 operator()(double x) const;

private:
  double x0_ = 0.0;
  double spacing_ = 1.0;
  std::vector<Vec3> values_;
  std::vector<Vec3> second_;
};

/// Continuous forward map from the tangent disc of radius R onto the surface.
class LocalMap {
public:
  /// Throws DegenerateGrid when the trace has fewer than 3 curves or no complete step.
  static LocalMap fit(const TraceResult& trace);

  [[nodiscard]] const TangentFrame& frame() const noexcept { return frame_; }
  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] double radius() const noexcept { return radius_; }

  /// Surface point for tangent coordinates u. Throws OutOfDisc beyond R.
  [[nodiscard]] Vec3 eval(const Vec2& u) const;

  /// Point at signed radius r in [-R, R] on the diameter with direction angle
  /// `base` (negative r walks toward base + pi). eval() reduces to this with
  /// base in [0, pi].
  [[nodiscard]] Vec3 eval_polar(double signed_r, double base) const;

  /// The 2n+1-knot spline along the whole diameter at angle `base`.
  [[nodiscard]] NaturalSpline radial_curve(double base) const;

  /// Isoline j (1..n) at angle theta.
  [[nodiscard]] Vec3 isoline(int j, double theta) const;

private:
  TangentFrame frame_;
  int m_ = 0;
  int n_ = 0;
  double h_ = 0.0;
  double radius_ = 0.0;
  // Isoline j is the flat circle of radius j h plus a periodic spline of the
  // traced points' offset from it.
  std::vector<PeriodicSpline> offsets_;
};

/// eval() followed by projection onto the surface.
Vec3 eval_projected(const LocalMap& map, const SurfaceView& surface, const Vec2& u);

} // namespace geoexp
