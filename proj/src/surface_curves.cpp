#include "geoexp/surface_curves.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace geoexp {

Chart make_chart(const SurfaceView& surface, const Vec3& seed, const TraceParams& params, const LogQueryConfig& query) {
  Chart c{LocalMap::fit(radial_trace(surface, seed, params)), {}, query};
  c.mesh = build_map_mesh(c.map, query, &surface);
  return c;
}

std::optional<Vec2> chart_transition(const Chart& from, const Chart& to, const Vec2& u) {
  if (u.norm() > from.map.radius() + 1e-12) return std::nullopt;
  return log_query(to.mesh, from.map.eval(u), to.query);
}

namespace {

Vec2 carry(const std::vector<Chart>& charts, int from, int to, const Vec2& u, int segment) {
  const auto v = chart_transition(charts[from], charts[to], u);
  if (!v) throw Error(ErrorCode::TransitionLost, fmt::format("segment {} left the overlap of charts {} and {}", segment, from, to));
  return *v;
}

} // namespace

SurfaceCurve solve_closed_curve(const std::vector<Chart>& charts, int iterations) {
  const int k = static_cast<int>(charts.size());
  if (k < 3) throw Error(ErrorCode::InvalidConfig, "a closed curve needs at least 3 constraints");
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");

  for (int i = 0; i < k; ++i) {
    const int j = (i + 1) % k;
    if (!log_query(charts[i].mesh, charts[j].origin(), charts[i].query) ||
        !log_query(charts[j].mesh, charts[i].origin(), charts[j].query))
      throw Error(ErrorCode::OverlapViolation, fmt::format("charts {} and {} do not overlap", i, j));
  }

  std::vector<Vec2> c1(k, Vec2::Zero());
  for (int sweep = 0; sweep < iterations; ++sweep) {
    for (int i = 0; i < k; ++i) {
      const int prev = (i + k - 1) % k, next = (i + 1) % k;
      const Vec2 a = carry(charts, prev, i, c1[prev], i);
      const Vec2 b = carry(charts, next, i, c1[next], i);
      // B(1/2) = (c0 + 2 c1 + c2) / 4 = 0 with c0 = (c1 + a) / 2, c2 = (c1 + b) / 2.
      c1[i] = -(a + b) / 6.0;
    }
  }

  SurfaceCurve curve;
  curve.sweeps = iterations;
  curve.segments.resize(k);
  for (int i = 0; i < k; ++i) {
    const int prev = (i + k - 1) % k, next = (i + 1) % k;
    CurveSegment& s = curve.segments[i];
    s.c1 = c1[i];
    s.c0 = 0.5 * (c1[i] + carry(charts, prev, i, c1[prev], i));
    s.c2 = 0.5 * (c1[i] + carry(charts, next, i, c1[next], i));
    curve.residual = std::max(curve.residual, s.at(0.5).norm());
  }
  for (int i = 0; i < k; ++i) {
    const int next = (i + 1) % k;
    const double gap = (eval_curve(charts, curve, i, 1.0) - eval_curve(charts, curve, next, 0.0)).norm();
    curve.endpoint_mismatch = std::max(curve.endpoint_mismatch, gap);
  }
  return curve;
}

Vec3 eval_curve(const std::vector<Chart>& charts, const SurfaceCurve& curve, int segment, double t) {
  return charts.at(segment).map.eval(curve.segments.at(segment).at(t));
}

} // namespace geoexp
