#include "geoexp/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geoexp {
namespace {

class MeshField final : public ImplicitSurface {
public:
  explicit MeshField(const TriangleMesh& mesh) : bvh_(mesh.vertices, mesh.triangles) {}

protected:
  double value(const Vec3& x) const override {
    const auto hit = bvh_.closest(x);
    const double d = std::sqrt(hit->distance2);
    return inside(x) ? -d : d;
  }

  Vec3 gradient(const Vec3& x) const override {
    const auto hit = bvh_.closest(x);
    const double d = std::sqrt(hit->distance2);
    if (d < 1e-12) {
      const Tri& t = bvh_.triangles()[hit->triangle];
      const auto& v = bvh_.vertices();
      const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
      const double len = n.norm();
      return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    }
    const double sign = inside(x) ? -1.0 : 1.0;
    return sign * (x - hit->point) / d;
  }

private:
  bool inside(const Vec3& x) const { return bvh_.winding_number(x) >= 0.5; }

  TriangleBvh bvh_;
};

class PointCloudField final : public ImplicitSurface {
public:
  PointCloudField(std::vector<Vec3> points, const PointCloudParams& p)
      : tree_(std::move(points)), beta_(p.beta), delta_(p.delta) {}

protected:
  double value(const Vec3& x) const override {
    double dmin = 0.0;
    const auto& near = gather(x, dmin);
    const auto& pts = tree_.points();
    double sum = 0.0;
    for (int k : near) sum += std::exp(-beta_ * ((x - pts[k]).norm() - dmin));
    return dmin - std::log(sum) / beta_ - delta_;
  }

  Vec3 gradient(const Vec3& x) const override {
    double dmin = 0.0;
    const auto& near = gather(x, dmin);
    const auto& pts = tree_.points();
    double sum = 0.0;
    Vec3 g = Vec3::Zero();
    for (int k : near) {
      const Vec3 d = x - pts[k];
      const double r = d.norm();
      const double w = std::exp(-beta_ * (r - dmin));
      sum += w;
      if (r > 0.0) g += w * d / r;
    }
    return g / sum;
  }

private:
  const std::vector<int>& gather(const Vec3& x, double& dmin) const {
    thread_local std::vector<int> out;
    const auto [idx, d2] = tree_.nearest(x);
    (void)idx;
    dmin = std::sqrt(d2);
    const double cutoff = dmin + 36.0 / beta_;
    tree_.radius(x, cutoff * cutoff, out);
    return out;
  }

  KdTree tree_;
  double beta_;
  double delta_;
};

} // namespace

std::unique_ptr<ImplicitSurface> build_mesh_field(const TriangleMesh& mesh) {
  if (mesh.triangles.empty() || mesh.vertices.empty()) throw Error(ErrorCode::EmptyInput, "mesh has no triangles");
  return std::make_unique<MeshField>(mesh);
}

void PointCloudParams::validate() const {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidConfig, "point cloud beta must be positive");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidConfig, "point cloud delta must be positive");
}

std::unique_ptr<ImplicitSurface> build_point_cloud_field(std::vector<Vec3> points, const PointCloudParams& params) {
  params.validate();
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "point cloud is empty");
  return std::make_unique<PointCloudField>(std::move(points), params);
}

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) build(0, static_cast<int>(points_.size()), 0);
}

int KdTree::build(int first, int count, int depth) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({first, count, -1, 0.0, -1, -1});
  if (count <= 8 || depth > 60) return index;
  Eigen::AlignedBox3d box;
  for (int k = first; k < first + count; ++k) box.extend(points_[order_[k]]);
  int axis = 0;
  box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(first, mid - first, depth + 1);
  const int right = build(mid, first + count - mid, depth + 1);
  Node& n = nodes_[index];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return index;
}

void KdTree::nearest_rec(int index, const Vec3& x, int& best, double& best_d2) const {
  const Node& n = nodes_[index];
  if (n.axis < 0) {
    for (int k = n.first; k < n.first + n.count; ++k) {
      const int i = order_[k];
      const double d2 = (points_[i] - x).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
        best_d2 = d2;
        best = i;
      }
    }
    return;
  }
  const double diff = x[n.axis] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  nearest_rec(near, x, best, best_d2);
  if (diff * diff <= best_d2) nearest_rec(far, x, best, best_d2);
}

std::pair<int, double> KdTree::nearest(const Vec3& x) const {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) nearest_rec(0, x, best, best_d2);
  return {best, best_d2};
}

void KdTree::radius_rec(int index, const Vec3& x, double r2, std::vector<int>& out) const {
  const Node& n = nodes_[index];
  if (n.axis < 0) {
    for (int k = n.first; k < n.first + n.count; ++k)
      if ((points_[order_[k]] - x).squaredNorm() <= r2) out.push_back(order_[k]);
    return;
  }
  const double diff = x[n.axis] - n.split;
  // Points equal to the split value may sit on either side of the median.
  if (diff <= 0.0 || diff * diff <= r2) radius_rec(n.left, x, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) radius_rec(n.right, x, r2, out);
}

void KdTree::radius(const Vec3& x, double r2, std::vector<int>& out) const {
  out.clear();
  if (!nodes_.empty()) radius_rec(0, x, r2, out);
}

Normalization unit_cube_normalization(const std::vector<Vec3>& points) {
  if (points.empty()) return {};
  Eigen::AlignedBox3d box;
  for (const auto& p : points) box.extend(p);
  const double side = box.sizes().maxCoeff();
  return {box.center(), side > 0.0 ? 2.0 / side : 1.0};
}

} // namespace geoexp
