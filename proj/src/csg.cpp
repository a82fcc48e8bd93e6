#include "geoexp/csg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geoexp {
namespace {

struct FieldSample {
  double value;
  Vec3 gradient;
};

template <class... Ts> struct Overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

FieldSample sample_sphere(const SpherePrim& s, const Vec3& x) {
  const Vec3 d = x - s.center;
  const double r = d.norm();
  return {r - s.radius, r > 0.0 ? Vec3(d / r) : Vec3::UnitZ()};
}

FieldSample sample_torus(const TorusPrim& t, const Vec3& x) {
  const Vec3 d = x - t.center;
  const double rho = std::hypot(d.x(), d.y());
  const Vec3 radial = rho > 0.0 ? Vec3(d.x() / rho, d.y() / rho, 0.0) : Vec3::UnitX();
  const double a = rho - t.major_radius;
  const double q = std::hypot(a, d.z());
  if (q == 0.0) return {-t.minor_radius, radial};
  return {q - t.minor_radius, (a / q) * radial + (d.z() / q) * Vec3::UnitZ()};
}

FieldSample sample_plane(const PlanePrim& p, const Vec3& x) {
  const Vec3 n = p.normal.normalized();
  return {n.dot(x - p.point), n};
}

FieldSample sample_saddle(const SaddlePrim& s, const Vec3& x) {
  const Vec3 d = x - s.center;
  const double k = s.curvature;
  return {d.z() - k * (d.x() * d.x() - d.y() * d.y()), Vec3(-2.0 * k * d.x(), 2.0 * k * d.y(), 1.0)};
}

double box_value(const BoxPrim& b, const Vec3& x) {
  const Vec3 q = (x - b.center).cwiseAbs() - b.half_extents;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

FieldSample sample_box(const BoxPrim& b, const Vec3& x) {
  const Vec3 d = x - b.center;
  const Vec3 q = d.cwiseAbs() - b.half_extents;
  const Vec3 sign(d.x() < 0 ? -1.0 : 1.0, d.y() < 0 ? -1.0 : 1.0, d.z() < 0 ? -1.0 : 1.0);
  const Vec3 outside = q.cwiseMax(0.0);
  const double on = outside.norm();
  if (on > 0.0) return {on, (outside / on).cwiseProduct(sign)};
  int axis = 0;
  q.maxCoeff(&axis);
  Vec3 g = Vec3::Zero();
  g[axis] = sign[axis];
  return {q[axis], g};
}

FieldSample sample_capsule(const CapsulePrim& c, const Vec3& x) {
  const Vec3 ab = c.b - c.a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - c.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  const Vec3 d = x - (c.a + t * ab);
  const double r = d.norm();
  Vec3 g;
  if (r > 0.0) {
    g = d / r;
  } else {
    g = ab.unitOrthogonal();
  }
  return {r - c.radius, g};
}

FieldSample sample_cone(const ConePrim& c, const Vec3& x) {
  const Vec3 d = x - c.apex;
  const double rho = std::hypot(d.x(), d.y());
  const Vec3 radial = rho > 0.0 ? Vec3(d.x() / rho, d.y() / rho, 0.0) : Vec3::UnitX();
  const double sa = std::sin(c.half_angle), ca = std::cos(c.half_angle);
  if (rho * sa + d.z() * ca >= 0.0) {
    return {rho * ca - d.z() * sa, ca * radial - sa * Vec3::UnitZ()};
  }
  const double r = d.norm();
  return {r, r > 0.0 ? Vec3(d / r) : Vec3(-Vec3::UnitZ())};
}

FieldSample sample_primitive(const Primitive& p, const Vec3& x) {
  return std::visit(Overloaded{
                        [&](const SpherePrim& s) { return sample_sphere(s, x); },
                        [&](const TorusPrim& s) { return sample_torus(s, x); },
                        [&](const PlanePrim& s) { return sample_plane(s, x); },
                        [&](const SaddlePrim& s) { return sample_saddle(s, x); },
                        [&](const BoxPrim& s) { return sample_box(s, x); },
                        [&](const CapsulePrim& s) { return sample_capsule(s, x); },
                        [&](const ConePrim& s) { return sample_cone(s, x); },
                    },
                    p);
}

double value_primitive(const Primitive& p, const Vec3& x) {
  if (const auto* b = std::get_if<BoxPrim>(&p)) return box_value(*b, x);
  return sample_primitive(p, x).value;
}

void validate_primitive(const Primitive& p) {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidPrimitive, what); };
  std::visit(Overloaded{
                 [&](const SpherePrim& s) {
                   if (!(s.radius > 0.0)) fail("sphere radius must be positive");
                 },
                 [&](const TorusPrim& s) {
                   if (!(s.major_radius > 0.0) || !(s.minor_radius > 0.0))
                     fail("torus radii must be positive");
                 },
                 [&](const PlanePrim& s) {
                   if (!(s.normal.norm() > 0.0)) fail("plane normal must be non-zero");
                 },
                 [&](const SaddlePrim& s) {
                   if (!std::isfinite(s.curvature)) fail("saddle curvature must be finite");
                 },
                 [&](const BoxPrim& s) {
                   if (!(s.half_extents.minCoeff() > 0.0)) fail("box half extents must be positive");
                 },
                 [&](const CapsulePrim& s) {
                   if (!(s.radius > 0.0)) fail("capsule radius must be positive");
                 },
                 [&](const ConePrim& s) {
                   if (!(s.half_angle > 0.0 && s.half_angle < kPi / 2))
                     fail("cone half angle must be in (0, pi/2)");
                 },
             },
             p);
}

void validate_tree(const CsgNode& node) {
  switch (node.op) {
  case CsgOp::Primitive:
    if (!node.children.empty()) throw Error(ErrorCode::InvalidPrimitive, "primitive with children");
    validate_primitive(node.primitive);
    return;
  case CsgOp::Union:
  case CsgOp::Intersection:
    if (node.children.empty()) throw Error(ErrorCode::InvalidPrimitive, "boolean node without children");
    break;
  case CsgOp::Complement:
  case CsgOp::Offset:
    if (node.children.size() != 1)
      throw Error(ErrorCode::InvalidPrimitive, "unary node needs exactly one child");
    if (!std::isfinite(node.offset)) throw Error(ErrorCode::InvalidPrimitive, "offset must be finite");
    break;
  }
  for (const auto& c : node.children) validate_tree(c);
}

FieldSample sample_node(const CsgNode& node, const Vec3& x) {
  switch (node.op) {
  case CsgOp::Primitive: return sample_primitive(node.primitive, x);
  case CsgOp::Union: {
    FieldSample best = sample_node(node.children.front(), x);
    for (std::size_t k = 1; k < node.children.size(); ++k) {
      FieldSample s = sample_node(node.children[k], x);
      if (s.value < best.value) best = s;
    }
    return best;
  }
  case CsgOp::Intersection: {
    FieldSample best = sample_node(node.children.front(), x);
    for (std::size_t k = 1; k < node.children.size(); ++k) {
      FieldSample s = sample_node(node.children[k], x);
      if (s.value > best.value) best = s;
    }
    return best;
  }
  case CsgOp::Complement: {
    FieldSample s = sample_node(node.children.front(), x);
    return {-s.value, -s.gradient};
  }
  case CsgOp::Offset: {
    FieldSample s = sample_node(node.children.front(), x);
    return {s.value - node.offset, s.gradient};
  }
  }
  return {std::numeric_limits<double>::quiet_NaN(), Vec3::Zero()};
}

double value_node(const CsgNode& node, const Vec3& x) {
  switch (node.op) {
  case CsgOp::Primitive: return value_primitive(node.primitive, x);
  case CsgOp::Union: {
    double v = value_node(node.children.front(), x);
    for (std::size_t k = 1; k < node.children.size(); ++k) v = std::min(v, value_node(node.children[k], x));
    return v;
  }
  case CsgOp::Intersection: {
    double v = value_node(node.children.front(), x);
    for (std::size_t k = 1; k < node.children.size(); ++k) v = std::max(v, value_node(node.children[k], x));
    return v;
  }
  case CsgOp::Complement: return -value_node(node.children.front(), x);
  case CsgOp::Offset: return value_node(node.children.front(), x) - node.offset;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

class CsgField final : public ImplicitSurface {
public:
  explicit CsgField(CsgNode root) : root_(std::move(root)) {}

protected:
  double value(const Vec3& x) const override { return value_node(root_, x); }
  Vec3 gradient(const Vec3& x) const override { return sample_node(root_, x).gradient; }

private:
  CsgNode root_;
};

} // namespace

std::unique_ptr<ImplicitSurface> build_csg_field(const CsgNode& root) {
  validate_tree(root);
  return std::make_unique<CsgField>(root);
}

CsgNode dented_sphere(const Vec3& dent_direction, double dent_radius, double dent_depth) {
  const Vec3 dir = dent_direction.normalized();
  const Vec3 center = dir * (1.0 + dent_radius - dent_depth);
  return CsgNode::intersection_of({CsgNode::leaf(SpherePrim{Vec3::Zero(), 1.0}),
                                   CsgNode::complement(CsgNode::leaf(SpherePrim{center, dent_radius}))});
}

} // namespace geoexp
