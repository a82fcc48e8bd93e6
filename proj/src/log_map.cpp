#include "geoexp/log_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "geoexp/delaunay.hpp"
#include "geoexp/io.hpp"
#include "geoexp/parallel.hpp"
#include "geoexp/random.hpp"

namespace geoexp {

void LogQueryConfig::validate() const {
  if (!(max_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "max_radius must be positive");
  if (interior_samples < 100) throw Error(ErrorCode::InvalidConfig, "interior_samples must be >= 100");
  if (boundary_samples < 0) throw Error(ErrorCode::InvalidConfig, "boundary_samples must be >= 0");
}

MapMesh::MapMesh(std::vector<Vec2> uv, std::vector<Vec3> positions, std::vector<Tri> triangles, double radius)
    : uv_(std::move(uv)), radius_(radius) {
  if (uv_.size() != positions.size()) throw Error(ErrorCode::InvalidConfig, "uv and position counts differ");
  vertex_tris_.assign(uv_.size(), {});
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
    for (int v : triangles[t]) {
      if (v < 0 || v >= static_cast<int>(uv_.size())) throw Error(ErrorCode::InvalidConfig, "index out of range");
      vertex_tris_[v].push_back(t);
    }
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      // Each interior edge is seen twice, once per orientation.
      sum += (uv_[a] - uv_[b]).norm();
      ++count;
    }
  mean_uv_edge_ = count ? sum / static_cast<double>(count) : 0.0;
  bvh_ = TriangleBvh(std::move(positions), std::move(triangles));
}

int MapMesh::boundary_vertex_count() const {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : triangles())
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
  std::vector<char> on(uv_.size(), 0);
  for (const auto& [e, c] : edges)
    if (c == 1) on[e.first] = on[e.second] = 1;
  return static_cast<int>(std::count(on.begin(), on.end(), 1));
}

Vec2 MapMesh::uv_at(const TriangleBvh::Hit& hit) const {
  const Tri& t = triangles()[hit.triangle];
  return hit.barycentric[0] * uv_[t[0]] + hit.barycentric[1] * uv_[t[1]] + hit.barycentric[2] * uv_[t[2]];
}

MapMesh build_map_mesh(const LocalMap& map, const LogQueryConfig& cfg, const SurfaceView* surface) {
  cfg.validate();
  const double R = map.radius();
  const int interior = cfg.interior_samples;
  const int boundary = cfg.boundary_samples > 0 ? cfg.boundary_samples : 8 * map.m();

  // Golden-angle spiral. The outermost ring stops half a sample spacing short of
  // the boundary circle so no sliver triangles form against it.
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  CounterRng rng(derive_seed(cfg.seed, "disc"));
  const double offset = kTwoPi * rng.uniform();
  const double r_in = R * (1.0 - 0.5 * std::sqrt(kPi / interior));
  std::vector<Vec2> uv;
  uv.reserve(interior + boundary);
  for (int k = 0; k < interior; ++k) {
    const double r = r_in * std::sqrt((k + 0.5) / interior);
    const double a = offset + golden * k;
    uv.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  for (int k = 0; k < boundary; ++k) {
    const double a = kTwoPi * k / boundary;
    uv.emplace_back(R * std::cos(a), R * std::sin(a));
  }

  std::vector<Tri> tris = delaunay_triangulate(uv);
  const int V = static_cast<int>(uv.size());
  if (static_cast<int>(tris.size()) != 2 * V - boundary - 2)
    throw Error(ErrorCode::TriangulationFailure,
                fmt::format("disc triangulation has {} triangles, expected {}", tris.size(), 2 * V - boundary - 2));

  std::vector<Vec3> pos(uv.size());
  const bool project = cfg.project_to_surface && surface != nullptr;
  parallel_for(uv.size(), [&](std::size_t k) {
    pos[k] = map.eval(uv[k]);
    if (project) pos[k] = surface->project(pos[k]);
  });
  return MapMesh(std::move(uv), std::move(pos), std::move(tris), R);
}

std::optional<Vec2> log_query(const MapMesh& mesh, const Vec3& x, const LogQueryConfig& cfg) {
  const auto hit = mesh.bvh().closest(x, cfg.max_radius);
  if (!hit) return std::nullopt;
  return mesh.uv_at(*hit);
}

std::vector<Vec2> multivalued_log(const MapMesh& mesh, const Vec3& x, const LogQueryConfig& cfg) {
  std::vector<TriangleBvh::Hit> hits;
  mesh.bvh().within(x, cfg.max_radius, hits);
  if (hits.empty()) return {};
  auto before = [](const TriangleBvh::Hit& a, const TriangleBvh::Hit& b) {
    return a.distance2 < b.distance2 || (a.distance2 == b.distance2 && a.triangle < b.triangle);
  };
  std::map<int, std::size_t> by_triangle;
  for (std::size_t k = 0; k < hits.size(); ++k) by_triangle[hits[k].triangle] = k;

  std::vector<TriangleBvh::Hit> minima;
  const auto& tris = mesh.triangles();
  for (const auto& h : hits) {
    bool minimum = true;
    for (int v : tris[h.triangle]) {
      for (int other : mesh.vertex_triangles()[v]) {
        if (other == h.triangle) continue;
        auto it = by_triangle.find(other);
        if (it != by_triangle.end() && before(hits[it->second], h)) {
          minimum = false;
          break;
        }
      }
      if (!minimum) break;
    }
    if (minimum) minima.push_back(h);
  }
  std::sort(minima.begin(), minima.end(), before);

  const double separation = 4.0 * mesh.mean_uv_edge();
  std::vector<Vec2> out;
  for (const auto& h : minima) {
    const Vec2 u = mesh.uv_at(h);
    const bool distinct =
        std::all_of(out.begin(), out.end(), [&](const Vec2& w) { return (w - u).norm() > separation; });
    if (distinct) out.push_back(u);
  }
  return out;
}

Vec2 select_preimage(const std::vector<Vec2>& candidates, PreimageRule rule) {
  if (candidates.empty()) throw Error(ErrorCode::EmptyCandidates, "no preimage candidates");
  auto key = [rule](const Vec2& u) {
    const double radius = u.norm();
    const double phase = wrap_angle_positive(std::atan2(u.y(), u.x()));
    // Final coordinates make the order total so the choice cannot depend on input order.
    return rule == PreimageRule::ShortestRadius ? std::array<double, 4>{radius, phase, u.x(), u.y()}
                                                : std::array<double, 4>{phase, radius, u.x(), u.y()};
  };
  return *std::min_element(candidates.begin(), candidates.end(),
                           [&](const Vec2& a, const Vec2& b) { return key(a) < key(b); });
}

FoldReport fold_report(const MapMesh& mesh) {
  FoldReport rep;
  const auto& P = mesh.positions();
  const auto& uv = mesh.uv();
  const auto& tris = mesh.triangles();
  double scale = 0.0;
  if (!tris.empty()) scale = mesh.bvh().bounds().sizes().maxCoeff();
  const double area_floor = 1e-14 * std::max(scale * scale, 1e-300);

  std::vector<int> near;
  for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
    const Tri& a = tris[i];
    const double area = 0.5 * (P[a[1]] - P[a[0]]).cross(P[a[2]] - P[a[0]]).norm();
    if (area <= area_floor) {
      ++rep.degenerate_triangles;
      continue;
    }
    Box3 box;
    for (int v : a) box.extend(P[v]);
    mesh.bvh().overlapping(box, near);
    for (int j : near) {
      if (j <= i) continue;
      const Tri& b = tris[j];
      bool shared = false;
      for (int va : a)
        for (int vb : b) shared |= va == vb;
      if (shared) continue;
      if (!triangles_intersect(P[a[0]], P[a[1]], P[a[2]], P[b[0]], P[b[1]], P[b[2]])) continue;
      auto lift = [&](int v) { return Vec3(uv[v].x(), uv[v].y(), 0.0); };
      if (triangles_intersect(lift(a[0]), lift(a[1]), lift(a[2]), lift(b[0]), lift(b[1]), lift(b[2]))) continue;
      ++rep.intersecting_pairs;
    }
  }
  return rep;
}

void export_obj(const MapMesh& mesh, const std::filesystem::path& path, const std::vector<std::string>& comments) {
  const double R = mesh.radius();
  TexturedMesh out;
  out.positions = mesh.positions();
  out.triangles = mesh.triangles();
  out.uv.reserve(mesh.uv().size());
  for (const auto& u : mesh.uv()) out.uv.push_back((u + Vec2::Constant(R)) / (2.0 * R));
  std::vector<std::string> header = comments;
  header.push_back(fmt::format("uv = {} * vt - {} (map radius {})", 2.0 * R, R, R));
  write_textured_obj(path, out, header);
}

} // namespace geoexp
