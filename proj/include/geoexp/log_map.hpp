#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "geoexp/bvh.hpp"
#include "geoexp/spline_map.hpp"

namespace geoexp {

struct LogQueryConfig {
  double max_radius = 1e-2;
  int interior_samples = 10000;
  int boundary_samples = 0;  ///< 0 selects 8 m
  bool project_to_surface = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Triangulated image of a local map: uv vertices in the tangent disc, their 3D
/// positions, and a BVH over the 3D triangles for inverse queries.
class MapMesh {
public:
  MapMesh() = default;
  /// Any uv-equipped triangle mesh (also used for synthetic fixtures).
  MapMesh(std::vector<Vec2> uv, std::vector<Vec3> positions, std::vector<Tri> triangles, double radius);

  [[nodiscard]] const std::vector<Vec2>& uv() const noexcept { return uv_; }
  [[nodiscard]] const std::vector<Vec3>& positions() const noexcept { return bvh_.vertices(); }
  [[nodiscard]] const std::vector<Tri>& triangles() const noexcept { return bvh_.triangles(); }
  [[nodiscard]] const TriangleBvh& bvh() const noexcept { return bvh_; }
  [[nodiscard]] double radius() const noexcept { return radius_; }
  [[nodiscard]] double mean_uv_edge() const noexcept { return mean_uv_edge_; }
  /// Triangles incident to each vertex.
  [[nodiscard]] const std::vector<std::vector<int>>& vertex_triangles() const noexcept { return vertex_tris_; }
  [[nodiscard]] int boundary_vertex_count() const;

  [[nodiscard]] Vec2 uv_at(const TriangleBvh::Hit& hit) const;

private:
  std::vector<Vec2> uv_;
  TriangleBvh bvh_;
  double radius_ = 0.0;
  double mean_uv_edge_ = 0.0;
  std::vector<std::vector<int>> vertex_tris_;
};

/// Uniform disc samples (a golden-angle spiral with a seeded rotation), 8m or the
/// configured number of boundary samples, Delaunay triangulation in uv, and 3D
/// positions from the map. Throws TriangulationFailure.
MapMesh build_map_mesh(const LocalMap& map, const LogQueryConfig& cfg, const SurfaceView* surface = nullptr);

/// Tangent coordinates of the closest mesh point within max_radius.
std::optional<Vec2> log_query(const MapMesh& mesh, const Vec3& x, const LogQueryConfig& cfg);

/// Every local minimum of the distance to the mesh within max_radius, sorted by
/// distance and deduplicated in uv (closer than 4 mean edge lengths).
std::vector<Vec2> multivalued_log(const MapMesh& mesh, const Vec3& x, const LogQueryConfig& cfg);

enum class PreimageRule { ShortestRadius, SmallestPhase };

/// Throws EmptyCandidates.
Vec2 select_preimage(const std::vector<Vec2>& candidates, PreimageRule rule);

struct FoldReport {
  int degenerate_triangles = 0;
  int intersecting_pairs = 0;  ///< 3D images intersect while the uv triangles do not

  [[nodiscard]] bool clean() const { return degenerate_triangles == 0 && intersecting_pairs == 0; }
};
FoldReport fold_report(const MapMesh& mesh);

/// OBJ with v, vt (uv rescaled from [-R, R]^2 to [0, 1]^2) and f records.
void export_obj(const MapMesh& mesh, const std::filesystem::path& path, const std::vector<std::string>& comments = {});

} // namespace geoexp
