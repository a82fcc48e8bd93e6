#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "geoexp/csg.hpp"
#include "geoexp/fields.hpp"

namespace geoexp {

enum class SceneKind { Csg, Mesh, PointCloud };

struct Scene {
  SceneKind kind = SceneKind::Csg;
  std::unique_ptr<ImplicitSurface> surface;
  std::size_t input_size = 0;  ///< mesh vertices or cloud points; 0 for CSG
};

/// JSON scene description:
///   {"type": "csg", "root": NODE}
///   {"type": "mesh", "path": "x.obj", "normalize": true}
///   {"type": "point_cloud", "path": "x.xyz", "beta": 200, "delta": 0.005, "normalize": true}
/// where NODE is {"op": "sphere" | "torus" | "plane" | "saddle" | "box" | "capsule" |
/// "cone", ...parameters} or {"op": "union" | "intersection", "children": [NODE...]}
/// or {"op": "complement", "child": NODE} or {"op": "offset", "amount": a, "child": NODE}.
/// Relative paths resolve against the scene file's directory. File inputs are
/// rescaled into [-1, 1]^3 unless "normalize" is false.
/// Throws IoError (unreadable files) and InvalidConfig (malformed description).
Scene load_scene(const std::filesystem::path& path);
Scene parse_scene(const std::string& json_text, const std::filesystem::path& base_dir = ".");

CsgNode parse_csg_node(const std::string& json_text);

} // namespace geoexp
