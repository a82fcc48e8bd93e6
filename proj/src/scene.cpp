#include "geoexp/scene.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geoexp/io.hpp"

namespace geoexp {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, "scene: " + what); }

Vec3 vec3(const json& j, const char* key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) bad(std::string(key) + " must be an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) bad(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

CsgNode node_from(const json& j) {
  if (!j.is_object() || !j.contains("op")) bad("node needs an \"op\"");
  const std::string op = j.at("op").get<std::string>();
  auto child = [&]() -> CsgNode {
    if (j.contains("child")) return node_from(j.at("child"));
    if (j.contains("children") && j.at("children").size() == 1) return node_from(j.at("children")[0]);
    bad(op + " needs exactly one child");
  };
  if (op == "sphere") return CsgNode::leaf(SpherePrim{vec3(j, "center", Vec3::Zero()), number(j, "radius", 1.0)});
  if (op == "torus")
    return CsgNode::leaf(
        TorusPrim{vec3(j, "center", Vec3::Zero()), number(j, "major_radius", 0.6), number(j, "minor_radius", 0.25)});
  if (op == "plane") return CsgNode::leaf(PlanePrim{vec3(j, "point", Vec3::Zero()), vec3(j, "normal", Vec3::UnitZ())});
  if (op == "saddle") return CsgNode::leaf(SaddlePrim{vec3(j, "center", Vec3::Zero()), number(j, "curvature", 1.0)});
  if (op == "box")
    return CsgNode::leaf(BoxPrim{vec3(j, "center", Vec3::Zero()), vec3(j, "half_extents", Vec3::Constant(0.5))});
  if (op == "capsule")
    return CsgNode::leaf(CapsulePrim{vec3(j, "a", Vec3::Zero()), vec3(j, "b", Vec3::UnitZ()), number(j, "radius", 0.1)});
  if (op == "cone") return CsgNode::leaf(ConePrim{vec3(j, "apex", Vec3::Zero()), number(j, "half_angle", 0.35)});
  if (op == "union" || op == "intersection") {
    if (!j.contains("children") || !j.at("children").is_array()) bad(op + " needs a \"children\" array");
    std::vector<CsgNode> kids;
    for (const auto& c : j.at("children")) kids.push_back(node_from(c));
    return op == "union" ? CsgNode::union_of(std::move(kids)) : CsgNode::intersection_of(std::move(kids));
  }
  if (op == "complement") return CsgNode::complement(child());
  if (op == "offset") return CsgNode::offset_by(child(), number(j, "amount", 0.0));
  bad("unknown op \"" + op + "\"");
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

} // namespace

CsgNode parse_csg_node(const std::string& json_text) {
  try {
    return node_from(parse_json(json_text));
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

Scene parse_scene(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json j = parse_json(json_text);
  try {
    const std::string type = j.value("type", std::string("csg"));
    Scene scene;
    if (type == "csg") {
      if (!j.contains("root")) bad("csg scene needs a \"root\" node");
      scene.kind = SceneKind::Csg;
      scene.surface = build_csg_field(node_from(j.at("root")));
      return scene;
    }
    if (!j.contains("path")) bad(type + " scene needs a \"path\"");
    std::filesystem::path file = j.at("path").get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    const bool normalize = j.value("normalize", true);
    if (type == "mesh") {
      TriangleMesh mesh = read_obj(file);
      if (normalize) {
        const Normalization nz = unit_cube_normalization(mesh.vertices);
        for (auto& v : mesh.vertices) v = nz.apply(v);
      }
      scene.kind = SceneKind::Mesh;
      scene.input_size = mesh.vertices.size();
      scene.surface = build_mesh_field(mesh);
      return scene;
    }
    if (type == "point_cloud") {
      std::vector<Vec3> pts = read_point_cloud(file);
      if (normalize) {
        const Normalization nz = unit_cube_normalization(pts);
        for (auto& p : pts) p = nz.apply(p);
      }
      PointCloudParams params;
      params.beta = number(j, "beta", params.beta);
      params.delta = number(j, "delta", params.delta);
      scene.kind = SceneKind::PointCloud;
      scene.input_size = pts.size();
      scene.surface = build_point_cloud_field(std::move(pts), params);
      return scene;
    }
    bad("unknown scene type \"" + type + "\"");
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

} // namespace geoexp
