#include "geoexp/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace geoexp {

TrianglePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, {1, 0, 0}};

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, {0, 1, 0}};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {a + v * ab, {1 - v, v, 0}};
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, {0, 0, 1}};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {a + w * ac, {1 - w, 0, w}};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), {0, 1 - w, w}};
  }

  const double denom = va + vb + vc;
  if (!(std::abs(denom) > 0.0)) {
    // Degenerate triangle: fall back to the closest of its edges.
    TrianglePoint best{a, {1, 0, 0}};
    double best_d = (p - a).squaredNorm();
    auto edge = [&](const Vec3& s, const Vec3& e, int is, int ie) {
      const Vec3 se = e - s;
      const double l2 = se.squaredNorm();
      const double t = l2 > 0.0 ? std::clamp((p - s).dot(se) / l2, 0.0, 1.0) : 0.0;
      const Vec3 q = s + t * se;
      const double d = (p - q).squaredNorm();
      if (d < best_d) {
        best_d = d;
        Vec3 bc = Vec3::Zero();
        bc[is] = 1 - t;
        bc[ie] = t;
        best = {q, bc};
      }
    };
    edge(a, b, 0, 1);
    edge(b, c, 1, 2);
    edge(a, c, 0, 2);
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return {a + ab * v + ac * w, {1 - v - w, v, w}};
}

double solid_angle(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Van Oosterom and Strackee.
  const Vec3 ra = a - x, rb = b - x, rc = c - x;
  const double la = ra.norm(), lb = rb.norm(), lc = rc.norm();
  const double det = ra.dot(rb.cross(rc));
  const double den = la * lb * lc + ra.dot(rb) * lc + ra.dot(rc) * lb + rb.dot(rc) * la;
  return 2.0 * std::atan2(det, den);
}

namespace {

using Pts = std::array<Vec3, 3>;

// Interval of a triangle's crossing with a plane, projected on `dir`.
bool crossing_interval(const Pts& t, const std::array<double, 3>& d, const Vec3& dir, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  bool any = false;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      const double s = dir.dot(t[i]);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      any = true;
    }
    const int j = (i + 1) % 3;
    if ((d[i] < 0.0 && d[j] > 0.0) || (d[i] > 0.0 && d[j] < 0.0)) {
      const Vec3 p = t[i] + (t[j] - t[i]) * (d[i] / (d[i] - d[j]));
      const double s = dir.dot(p);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      any = true;
    }
  }
  return any;
}

bool coplanar_overlap(const Pts& A, const Pts& B, const Vec3& n, double tol) {
  int drop = 0;
  n.cwiseAbs().maxCoeff(&drop);
  const int u = (drop + 1) % 3, v = (drop + 2) % 3;
  auto to2 = [&](const Vec3& p) { return Vec2(p[u], p[v]); };
  std::array<Vec2, 3> a{to2(A[0]), to2(A[1]), to2(A[2])};
  std::array<Vec2, 3> b{to2(B[0]), to2(B[1]), to2(B[2])};
  auto separated = [&](const std::array<Vec2, 3>& edges_of) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = edges_of[(i + 1) % 3] - edges_of[i];
      const Vec2 axis(-e.y(), e.x());
      const double len = axis.norm();
      if (len == 0.0) continue;
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (const auto& p : a) {
        const double s = axis.dot(p) / len;
        amin = std::min(amin, s);
        amax = std::max(amax, s);
      }
      for (const auto& p : b) {
        const double s = axis.dot(p) / len;
        bmin = std::min(bmin, s);
        bmax = std::max(bmax, s);
      }
      if (amax <= bmin + tol || bmax <= amin + tol) return true;
    }
    return false;
  };
  return !separated(a) && !separated(b);
}

} // namespace

bool triangles_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0, const Vec3& b1,
                         const Vec3& b2) {
  const Pts A{a0, a1, a2}, B{b0, b1, b2};
  double scale = 0.0;
  for (const auto* t : {&A, &B})
    for (int i = 0; i < 3; ++i) scale = std::max(scale, ((*t)[(i + 1) % 3] - (*t)[i]).norm());
  if (scale == 0.0) return false;
  const double tol = 1e-9 * scale;

  const Vec3 nA = (a1 - a0).cross(a2 - a0);
  const Vec3 nB = (b1 - b0).cross(b2 - b0);
  const double lA = nA.norm(), lB = nB.norm();
  if (lA == 0.0 || lB == 0.0) return false;
  const Vec3 uA = nA / lA, uB = nB / lB;

  std::array<double, 3> dA{}, dB{};
  for (int i = 0; i < 3; ++i) {
    dA[i] = uB.dot(A[i] - b0);
    dB[i] = uA.dot(B[i] - a0);
    if (std::abs(dA[i]) <= tol) dA[i] = 0.0;
    if (std::abs(dB[i]) <= tol) dB[i] = 0.0;
  }
  auto one_side = [](const std::array<double, 3>& d) {
    return (d[0] > 0 && d[1] > 0 && d[2] > 0) || (d[0] < 0 && d[1] < 0 && d[2] < 0);
  };
  if (one_side(dA) || one_side(dB)) return false;
  if (dA[0] == 0.0 && dA[1] == 0.0 && dA[2] == 0.0) return coplanar_overlap(A, B, uA, tol);

  const Vec3 dir = uA.cross(uB);
  const double dl = dir.norm();
  if (dl < 1e-14) return coplanar_overlap(A, B, uA, tol);
  const Vec3 udir = dir / dl;
  double alo, ahi, blo, bhi;
  if (!crossing_interval(A, dA, udir, alo, ahi) || !crossing_interval(B, dB, udir, blo, bhi)) return false;
  return std::min(ahi, bhi) - std::max(alo, blo) > tol;
}

TriangleBvh::TriangleBvh(std::vector<Vec3> vertices, std::vector<Tri> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& t : triangles_)
    for (int k : t)
      if (k < 0 || k >= nv) throw Error(ErrorCode::InvalidConfig, "triangle index out of range");
  order_.resize(triangles_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!triangles_.empty()) {
    nodes_.reserve(2 * triangles_.size());
    build(0, static_cast<int>(triangles_.size()));
  }
}

Box3 TriangleBvh::bounds() const { return nodes_.empty() ? Box3() : nodes_.front().box; }

int TriangleBvh::build(int first, int count) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Box3 box, centroid_box;
  Vec3 vector_area = Vec3::Zero(), weighted = Vec3::Zero();
  double area_sum = 0.0;
  for (int k = first; k < first + count; ++k) {
    const Tri& t = triangles_[order_[k]];
    const Vec3 &a = vertices_[t[0]], &b = vertices_[t[1]], &c = vertices_[t[2]];
    box.extend(a);
    box.extend(b);
    box.extend(c);
    const Vec3 centroid = (a + b + c) / 3.0;
    centroid_box.extend(centroid);
    const Vec3 va = 0.5 * (b - a).cross(c - a);
    vector_area += va;
    const double area = va.norm();
    weighted += area * centroid;
    area_sum += area;
  }
  Vec3 center = area_sum > 0.0 ? Vec3(weighted / area_sum) : Vec3(box.center());
  double radius = 0.0;
  for (int k = first; k < first + count; ++k)
    for (int v : triangles_[order_[k]]) radius = std::max(radius, (vertices_[v] - center).norm());

  {
    Node& node = nodes_[index];
    node.box = box;
    node.first = first;
    node.count = count;
    node.vector_area = vector_area;
    node.center = center;
    node.radius = radius;
  }
  if (count <= 4) return index;

  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  auto centroid_of = [&](int t) {
    const Tri& tri = triangles_[t];
    return vertices_[tri[0]][axis] + vertices_[tri[1]][axis] + vertices_[tri[2]][axis];
  };
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) {
                     const double ca = centroid_of(a), cb = centroid_of(b);
                     return ca < cb || (ca == cb && a < b);
                   });
  const int left = build(first, mid - first);
  const int right = build(mid, first + count - mid);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

TriangleBvh::Hit TriangleBvh::hit_triangle(int t, const Vec3& x) const {
  const Tri& tri = triangles_[t];
  const TrianglePoint cp = closest_point_on_triangle(x, vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
  return {(cp.point - x).squaredNorm(), cp.point, cp.barycentric, t};
}

std::optional<TriangleBvh::Hit> TriangleBvh::closest(const Vec3& x, double max_distance) const {
  if (nodes_.empty()) return std::nullopt;
  Hit best;
  best.distance2 = max_distance * max_distance;
  bool found = false;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squaredExteriorDistance(x) > best.distance2) continue;
    if (node.left < 0) {
      for (int k = node.first; k < node.first + node.count; ++k) {
        const Hit h = hit_triangle(order_[k], x);
        if (h.distance2 < best.distance2 || (h.distance2 == best.distance2 && (!found || h.triangle < best.triangle))) {
          if (h.distance2 <= max_distance * max_distance) {
            best = h;
            found = true;
          }
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squaredExteriorDistance(x);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(x);
    // Push the farther child first so the nearer one is visited next.
    if (dl < dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  if (!found) return std::nullopt;
  return best;
}

void TriangleBvh::within(const Vec3& x, double radius, std::vector<Hit>& out) const {
  out.clear();
  if (nodes_.empty()) return;
  const double r2 = radius * radius;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(x) > r2) continue;
    if (node.left < 0) {
      for (int k = node.first; k < node.first + node.count; ++k) {
        const Hit h = hit_triangle(order_[k], x);
        if (h.distance2 <= r2) out.push_back(h);
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
}

void TriangleBvh::overlapping(const Box3& box, std::vector<int>& out) const {
  out.clear();
  if (nodes_.empty()) return;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (!node.box.intersects(box)) continue;
    if (node.left < 0) {
      for (int k = node.first; k < node.first + node.count; ++k) out.push_back(order_[k]);
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
}

namespace {
constexpr double kFarFieldRatio = 5.0;
}

double TriangleBvh::winding_recursive(int index, const Vec3& x) const {
  const Node& node = nodes_[index];
  const Vec3 d = node.center - x;
  const double dist = d.norm();
  if (dist > kFarFieldRatio * node.radius) {
    return node.vector_area.dot(d) / (4.0 * kPi * dist * dist * dist);
  }
  if (node.left < 0) {
    double w = 0.0;
    for (int k = node.first; k < node.first + node.count; ++k) {
      const Tri& t = triangles_[order_[k]];
      w += solid_angle(x, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    }
    return w / (4.0 * kPi);
  }
  return winding_recursive(node.left, x) + winding_recursive(node.right, x);
}

double TriangleBvh::winding_number(const Vec3& x) const {
  if (nodes_.empty()) return 0.0;
  return winding_recursive(0, x);
}

double TriangleBvh::winding_number_exact(const Vec3& x) const {
  double w = 0.0;
  for (const Tri& t : triangles_) w += solid_angle(x, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
  return w / (4.0 * kPi);
}

} // namespace geoexp
