#pragma once

#include <memory>
#include <vector>

#include "geoexp/bvh.hpp"
#include "geoexp/implicit.hpp"

namespace geoexp {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Tri> triangles;
};

/// Exact signed distance to a closed triangle mesh: unsigned distance from the
/// BVH, negative where the generalized winding number is at least 1/2.
/// Throws EmptyInput for a mesh without triangles and InvalidConfig for bad indices.
std::unique_ptr<ImplicitSurface> build_mesh_field(const TriangleMesh& mesh);

struct PointCloudParams {
  double beta = 200.0;
  double delta = 5e-3;

  void validate() const;
};

/// Smooth distance f = -(1/beta) log sum_i exp(-beta |x - p_i|) - delta.
/// Terms more than 36/beta above the nearest distance are dropped (each is below
/// e^-36 relative to the leading term). Throws EmptyInput.
std::unique_ptr<ImplicitSurface> build_point_cloud_field(std::vector<Vec3> points,
                                                         const PointCloudParams& params = {});

/// Static 3D kd-tree: nearest neighbour and radius queries.
class KdTree {
public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  [[nodiscard]] const std::vector<Vec3>& points() const noexcept { return points_; }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

  /// Index of the nearest point (lowest index on ties) and its squared distance.
  [[nodiscard]] std::pair<int, double> nearest(const Vec3& x) const;
  /// Indices of all points with squared distance <= r2.
  void radius(const Vec3& x, double r2, std::vector<int>& out) const;

private:
  struct Node {
    int first = 0;
    int count = 0;
    int axis = -1;
    double split = 0.0;
    int left = -1;
    int right = -1;
  };
  int build(int first, int count, int depth);
  void nearest_rec(int node, const Vec3& x, int& best, double& best_d2) const;
  void radius_rec(int node, const Vec3& x, double r2, std::vector<int>& out) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Uniformly rescales points into [-1, 1]^3 (centered on the bounding box, the
/// longest side mapped to length 2).
struct Normalization {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;
  [[nodiscard]] Vec3 apply(const Vec3& x) const { return (x - center) * scale; }
};
Normalization unit_cube_normalization(const std::vector<Vec3>& points);

} // namespace geoexp
