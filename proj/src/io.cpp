#include "geoexp/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace geoexp {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return in;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, int line, const std::string& what) {
  throw Error(ErrorCode::IoError, fmt::format("{}:{}: {}", path.string(), line, what));
}

// Resolves one OBJ index (1-based, negative = relative to the end).
int resolve_index(long raw, std::size_t count) {
  if (raw > 0) return static_cast<int>(raw - 1);
  if (raw < 0) return static_cast<int>(static_cast<long>(count) + raw);
  return -1;
}

struct ObjData {
  std::vector<Vec3> v;
  std::vector<Vec2> vt;
  std::vector<std::vector<std::pair<int, int>>> faces;  // (v, vt) per corner
};

ObjData parse_obj(const std::filesystem::path& path) {
  auto in = open_input(path);
  ObjData d;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z())) parse_error(path, lineno, "bad vertex");
      d.v.push_back(p);
    } else if (tag == "vt") {
      Vec2 t;
      if (!(ss >> t.x() >> t.y())) parse_error(path, lineno, "bad texture coordinate");
      d.vt.push_back(t);
    } else if (tag == "f") {
      std::vector<std::pair<int, int>> corners;
      std::string tok;
      while (ss >> tok) {
        long vi = 0, ti = 0;
        const char* b = tok.data();
        const char* e = tok.data() + tok.size();
        auto r = std::from_chars(b, e, vi);
        if (r.ec != std::errc()) parse_error(path, lineno, "bad face index '" + tok + "'");
        if (r.ptr != e && *r.ptr == '/') {
          const char* q = r.ptr + 1;
          if (q != e && *q != '/') {
            if (std::from_chars(q, e, ti).ec != std::errc()) parse_error(path, lineno, "bad texture index");
          }
        }
        const int v = resolve_index(vi, d.v.size());
        const int t = ti == 0 ? -1 : resolve_index(ti, d.vt.size());
        if (v < 0 || v >= static_cast<int>(d.v.size())) parse_error(path, lineno, "vertex index out of range");
        if (ti != 0 && (t < 0 || t >= static_cast<int>(d.vt.size())))
          parse_error(path, lineno, "texture index out of range");
        corners.emplace_back(v, t);
      }
      if (corners.size() < 3) parse_error(path, lineno, "face with fewer than 3 corners");
      d.faces.push_back(std::move(corners));
    }
  }
  return d;
}

} // namespace

TriangleMesh read_obj(const std::filesystem::path& path) {
  ObjData d = parse_obj(path);
  TriangleMesh mesh;
  mesh.vertices = std::move(d.v);
  for (const auto& f : d.faces)
    for (std::size_t k = 1; k + 1 < f.size(); ++k) mesh.triangles.push_back({f[0].first, f[k].first, f[k + 1].first});
  return mesh;
}

TexturedMesh read_textured_obj(const std::filesystem::path& path) {
  ObjData d = parse_obj(path);
  TexturedMesh mesh;
  std::map<std::pair<int, int>, int> remap;
  auto corner = [&](const std::pair<int, int>& c) {
    if (c.second < 0) throw Error(ErrorCode::IoError, "'" + path.string() + "': face corner without vt");
    auto [it, fresh] = remap.try_emplace(c, static_cast<int>(mesh.positions.size()));
    if (fresh) {
      mesh.positions.push_back(d.v[c.first]);
      mesh.uv.push_back(d.vt[c.second]);
    }
    return it->second;
  };
  for (const auto& f : d.faces)
    for (std::size_t k = 1; k + 1 < f.size(); ++k)
      mesh.triangles.push_back({corner(f[0]), corner(f[k]), corner(f[k + 1])});
  return mesh;
}

std::string format_double(double v) { return fmt::format("{}", v); }

void write_textured_obj(const std::filesystem::path& path, const TexturedMesh& mesh,
                        const std::vector<std::string>& header_comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  for (const auto& c : header_comments) out << "# " << c << '\n';
  for (const auto& p : mesh.positions) out << fmt::format("v {} {} {}\n", p.x(), p.y(), p.z());
  for (const auto& t : mesh.uv) out << fmt::format("vt {} {}\n", t.x(), t.y());
  for (const auto& t : mesh.triangles)
    out << fmt::format("f {0}/{0} {1}/{1} {2}/{2}\n", t[0] + 1, t[1] + 1, t[2] + 1);
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

namespace {

std::vector<Vec3> read_ply(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) parse_error(path, 1, "missing ply magic");
  long vertex_count = -1;
  bool in_vertex = false;
  std::vector<std::string> props;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "format") {
      std::string fmt_name;
      ss >> fmt_name;
      if (fmt_name != "ascii") parse_error(path, lineno, "only ascii PLY is supported");
    } else if (tag == "element") {
      std::string name;
      long count = 0;
      ss >> name >> count;
      in_vertex = name == "vertex";
      if (in_vertex) vertex_count = count;
    } else if (tag == "property" && in_vertex) {
      std::string type, name;
      ss >> type >> name;
      props.push_back(name);
    } else if (tag == "end_header") {
      break;
    }
  }
  auto find = [&](const char* n) {
    auto it = std::find(props.begin(), props.end(), n);
    if (it == props.end()) parse_error(path, lineno, std::string("missing vertex property ") + n);
    return static_cast<int>(it - props.begin());
  };
  const int ix = find("x"), iy = find("y"), iz = find("z");
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(std::max(vertex_count, 0L)));
  std::vector<double> row(props.size());
  for (long k = 0; k < vertex_count; ++k) {
    if (!std::getline(in, line)) parse_error(path, lineno, "truncated vertex list");
    ++lineno;
    std::istringstream ss(line);
    for (auto& r : row)
      if (!(ss >> r)) parse_error(path, lineno, "bad vertex row");
    pts.emplace_back(row[ix], row[iy], row[iz]);
  }
  return pts;
}

} // namespace

std::vector<Vec3> read_point_cloud(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".ply") return read_ply(path);
  auto in = open_input(path);
  std::vector<Vec3> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Vec3 p;
    if (!(ss >> p.x() >> p.y() >> p.z())) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      parse_error(path, lineno, "expected three coordinates");
    }
    pts.push_back(p);
  }
  return pts;
}

} // namespace geoexp
