#pragma once

#include <optional>
#include <vector>

#include "geoexp/log_map.hpp"

namespace geoexp {

struct Chart {
  LocalMap map;
  MapMesh mesh;
  LogQueryConfig query;

  [[nodiscard]] const Vec3& origin() const { return map.frame().origin; }
};

/// Traces, fits and meshes a chart around the projection of `seed`.
Chart make_chart(const SurfaceView& surface, const Vec3& seed, const TraceParams& params,
                 const LogQueryConfig& query = {});

/// Tangent coordinates in `to` of the surface point from.map.eval(u); none when
/// u leaves from's disc or the point is outside to's reach.
std::optional<Vec2> chart_transition(const Chart& from, const Chart& to, const Vec2& u);

struct CurveSegment {
  Vec2 c0 = Vec2::Zero();
  Vec2 c1 = Vec2::Zero();
  Vec2 c2 = Vec2::Zero();

  [[nodiscard]] Vec2 at(double t) const {
    const double s = 1.0 - t;
    return s * s * c0 + 2.0 * s * t * c1 + t * t * c2;
  }
};

/// Closed curve through the chart origins; segment i lives in chart i and passes
/// through its origin at t = 1/2.
struct SurfaceCurve {
  std::vector<CurveSegment> segments;
  int sweeps = 0;
  double residual = 0.0;           ///< max |B_i(1/2)| in chart units
  double endpoint_mismatch = 0.0;  ///< max world distance between shared segment ends
  bool closed = true;
};

/// Gauss-Seidel solve for the middle control points. Each segment's end points
/// are midpoints between its middle control point and the neighbour's,
/// carried over by chart transitions. Runs exactly `iterations` sweeps.
/// Throws OverlapViolation, TransitionLost, InvalidConfig.
SurfaceCurve solve_closed_curve(const std::vector<Chart>& charts, int iterations = 10);

/// Segment i at parameter t, pushed through chart i. Throws OutOfDisc.
Vec3 eval_curve(const std::vector<Chart>& charts, const SurfaceCurve& curve, int segment, double t);

} // namespace geoexp
