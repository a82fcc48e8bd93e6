#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "geoexp/csg.hpp"
#include "geoexp/fields.hpp"
#include "geoexp/random.hpp"

namespace fixtures {

using geoexp::Tri;
using geoexp::Vec2;
using geoexp::Vec3;

/// Field given by closures; the gradient falls back to central differences.
class LambdaSurface final : public geoexp::ImplicitSurface {
public:
  explicit LambdaSurface(std::function<double(const Vec3&)> f, std::function<Vec3(const Vec3&)> g = {})
      : f_(std::move(f)), g_(std::move(g)) {}

protected:
  double value(const Vec3& x) const override { return f_(x); }
  Vec3 gradient(const Vec3& x) const override { return g_ ? g_(x) : ImplicitSurface::gradient(x); }

private:
  std::function<double(const Vec3&)> f_;
  std::function<Vec3(const Vec3&)> g_;
};

inline std::unique_ptr<geoexp::ImplicitSurface> csg(const geoexp::Primitive& p) {
  return geoexp::build_csg_field(geoexp::CsgNode::leaf(p));
}

inline std::unique_ptr<geoexp::ImplicitSurface> unit_sphere() { return csg(geoexp::SpherePrim{Vec3::Zero(), 1.0}); }
inline std::unique_ptr<geoexp::ImplicitSurface> torus() { return csg(geoexp::TorusPrim{}); }
inline std::unique_ptr<geoexp::ImplicitSurface> plane() { return csg(geoexp::PlanePrim{}); }

/// Axis-aligned cube [lo, hi]^3 with outward-facing triangles.
inline geoexp::TriangleMesh cube_mesh(double lo = 0.0, double hi = 1.0) {
  geoexp::TriangleMesh m;
  for (int k = 0; k < 8; ++k) m.vertices.emplace_back(k & 1 ? hi : lo, k & 2 ? hi : lo, k & 4 ? hi : lo);
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

/// Unit icosphere; each level splits every triangle into four.
inline geoexp::TriangleMesh icosphere(int levels) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  geoexp::TriangleMesh m;
  for (const auto& v : std::vector<Vec3>{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}})
    m.vertices.push_back(v.normalized());
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int id = static_cast<int>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Tri> next;
    for (const auto& f : m.triangles) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    m.triangles = std::move(next);
  }
  return m;
}

/// Closed torus mesh around z (outward orientation).
/// Splits every triangle into four without moving any point: same surface, 4x the triangles.
inline geoexp::TriangleMesh subdivide_flat(const geoexp::TriangleMesh& in) {
  geoexp::TriangleMesh m = in;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
    mid.emplace(key, id);
    return id;
  };
  m.triangles.clear();
  for (const auto& f : in.triangles) {
    const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
    m.triangles.push_back({f[0], a, c});
    m.triangles.push_back({f[1], b, a});
    m.triangles.push_back({f[2], c, b});
    m.triangles.push_back({a, b, c});
  }
  return m;
}

inline geoexp::TriangleMesh torus_mesh(int nu = 48, int nv = 24, double R = 0.6, double r = 0.25) {
  geoexp::TriangleMesh m;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = geoexp::kTwoPi * i / nu, v = geoexp::kTwoPi * j / nv;
      m.vertices.emplace_back((R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u),
                              r * std::sin(v));
    }
  auto id = [&](int i, int j) { return ((i + nu) % nu) * nv + (j + nv) % nv; };
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

/// Evenly spread points on the unit sphere (spherical Fibonacci lattice).
inline void write_obj(const std::filesystem::path& path, const geoexp::TriangleMesh& mesh) {
  std::ofstream f(path);
  f.precision(17);
  for (const auto& v : mesh.vertices) f << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) f << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts;
  const double golden = geoexp::kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return pts;
}

inline Vec3 random_point(geoexp::CounterRng& rng, double lo = -1.0, double hi = 1.0) {
  return {lo + (hi - lo) * rng.uniform(), lo + (hi - lo) * rng.uniform(), lo + (hi - lo) * rng.uniform()};
}

inline Vec3 random_unit(geoexp::CounterRng& rng) {
  for (;;) {
    const Vec3 v = random_point(rng);
    const double n = v.norm();
    if (n > 1e-3 && n <= 1.0) return v / n;
  }
}

/// Point on the torus of TorusPrim{} at azimuth a and poloidal angle b.
// Cone of half-angle 20 degrees with its tip rounded by a small offset. Geodesics
// from a seed near the apex wrap around the tip, so the exp-map folds behind it.
struct ConeCase {
  std::unique_ptr<geoexp::ImplicitSurface> surface;
  double alpha = 20.0 * geoexp::kPi / 180.0;
  // Projection onto the cone of the point at distance dist from the apex, azimuth az.
  Vec3 on(double dist, double az) const {
    const Vec3 x(dist * std::sin(alpha) * std::cos(az), dist * std::sin(alpha) * std::sin(az), dist * std::cos(alpha));
    return geoexp::SurfaceView(*surface).project(x);
  }
};

inline ConeCase rounded_cone(double rounding = 0.002) {
  ConeCase c;
  c.surface = geoexp::build_csg_field(
      geoexp::CsgNode::offset_by(geoexp::CsgNode::leaf(geoexp::ConePrim{Vec3::Zero(), c.alpha}), rounding));
  return c;
}

inline Vec3 torus_point(double a, double b, double R = 0.6, double r = 0.25) {
  const double w = R + r * std::cos(b);
  return {w * std::cos(a), w * std::sin(a), r * std::sin(b)};
}

} // namespace fixtures
