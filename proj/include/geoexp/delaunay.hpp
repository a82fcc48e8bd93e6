#pragma once

#include <vector>

#include "geoexp/common.hpp"

namespace geoexp {

/// Sign-exact orientation: > 0 when (a, b, c) turn counter-clockwise, 0 when
/// collinear. A floating-point filter settles most calls; the rest are decided
/// in exact rational arithmetic.
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Sign-exact in-circle test: > 0 when d lies strictly inside the circle through
/// the counter-clockwise triangle (a, b, c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Delaunay triangulation of a planar point set (incremental Bowyer-Watson with
/// exact predicates). Triangles are counter-clockwise. Duplicate points are left
/// unreferenced. Throws TriangulationFailure for fewer than 3 non-collinear points.
std::vector<Tri> delaunay_triangulate(const std::vector<Vec2>& points);

} // namespace geoexp
