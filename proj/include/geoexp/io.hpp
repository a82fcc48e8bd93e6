#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geoexp/fields.hpp"

namespace geoexp {

/// OBJ reader: `v` and `f` records only; polygons are fan-triangulated and
/// `v/vt/vn` and negative indices are accepted. Throws IoError.
TriangleMesh read_obj(const std::filesystem::path& path);

/// Mesh with per-vertex texture coordinates, as written by the log-map export and
/// read back by the metrics command.
struct TexturedMesh {
  std::vector<Vec3> positions;
  std::vector<Vec2> uv;
  std::vector<Tri> triangles;  ///< indices shared by positions and uv
};

/// Reads an OBJ with `vt` records. Corners are split so that each (v, vt) pair
/// becomes its own vertex. Throws IoError.
TexturedMesh read_textured_obj(const std::filesystem::path& path);

void write_textured_obj(const std::filesystem::path& path, const TexturedMesh& mesh,
                        const std::vector<std::string>& header_comments = {});

/// Points from whitespace-separated `x y z` lines (extra columns ignored) or an
/// ASCII PLY with x/y/z vertex properties, chosen by extension.
std::vector<Vec3> read_point_cloud(const std::filesystem::path& path);

/// Formats a double so that it parses back to the same value.
std::string format_double(double v);

} // namespace geoexp
