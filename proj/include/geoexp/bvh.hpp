#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "geoexp/common.hpp"

namespace geoexp {

using Box3 = Eigen::AlignedBox3d;

/// Closest point on triangle (a, b, c) to x, with barycentric weights.
struct TrianglePoint {
  Vec3 point;
  Vec3 barycentric;
};
TrianglePoint closest_point_on_triangle(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

/// Signed solid angle of triangle (a, b, c) seen from x (positive for CCW seen
/// from outside the side the normal points to).
double solid_angle(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c);

/// Separating-axis style test; triangles that only touch are not reported.
bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                         const Vec3& b1, const Vec3& b2);

/// Axis-aligned bounding volume hierarchy over a triangle soup. Supports
/// nearest-triangle queries, radius queries, box overlap and a hierarchical
/// winding number with a dipole far-field approximation.
class TriangleBvh {
public:
  struct Hit {
    double distance2 = std::numeric_limits<double>::infinity();
    Vec3 point = Vec3::Zero();
    Vec3 barycentric = Vec3::Zero();
    int triangle = -1;
  };

  TriangleBvh() = default;
  TriangleBvh(std::vector<Vec3> vertices, std::vector<Tri> triangles);

  [[nodiscard]] const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  [[nodiscard]] const std::vector<Tri>& triangles() const noexcept { return triangles_; }
  [[nodiscard]] bool empty() const noexcept { return triangles_.empty(); }
  [[nodiscard]] Box3 bounds() const;

  /// Nearest triangle within `max_distance`; ties go to the lowest triangle index.
  [[nodiscard]] std::optional<Hit> closest(const Vec3& x,
                                           double max_distance = std::numeric_limits<double>::infinity()) const;

  /// Every triangle whose closest point lies within `radius` of x.
  void within(const Vec3& x, double radius, std::vector<Hit>& out) const;

  /// Indices of triangles whose bounding boxes overlap `box`.
  void overlapping(const Box3& box, std::vector<int>& out) const;

  /// Generalized winding number; ~1 inside a closed outward-oriented mesh, ~0 outside.
  [[nodiscard]] double winding_number(const Vec3& x) const;

  /// Exact O(N) winding number, for testing the hierarchical one.
  [[nodiscard]] double winding_number_exact(const Vec3& x) const;

private:
  struct Node {
    Box3 box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
    Vec3 vector_area = Vec3::Zero();
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
  };

  int build(int first, int count);
  [[nodiscard]] Hit hit_triangle(int t, const Vec3& x) const;
  [[nodiscard]] double winding_recursive(int node, const Vec3& x) const;

  std::vector<Vec3> vertices_;
  std::vector<Tri> triangles_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

} // namespace geoexp
