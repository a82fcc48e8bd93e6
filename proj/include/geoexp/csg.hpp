#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "geoexp/implicit.hpp"

namespace geoexp {

struct SpherePrim {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Torus around the z axis through `center`.
struct TorusPrim {
  Vec3 center = Vec3::Zero();
  double major_radius = 0.6;
  double minor_radius = 0.25;
};

struct PlanePrim {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
};

/// f = (z - cz) - k ((x - cx)^2 - (y - cy)^2); not a distance field.
struct SaddlePrim {
  Vec3 center = Vec3::Zero();
  double curvature = 1.0;
};

struct BoxPrim {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.5);
};

struct CapsulePrim {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::UnitZ();
  double radius = 0.1;
};

/// Infinite single-nappe cone opening along +z from `apex`.
struct ConePrim {
  Vec3 apex = Vec3::Zero();
  double half_angle = 0.35;
};

using Primitive =
    std::variant<SpherePrim, TorusPrim, PlanePrim, SaddlePrim, BoxPrim, CapsulePrim, ConePrim>;

enum class CsgOp { Primitive, Union, Intersection, Complement, Offset };

struct CsgNode {
  CsgOp op = CsgOp::Primitive;
  Primitive primitive{};
  double offset = 0.0;
  std::vector<CsgNode> children;

  static CsgNode leaf(Primitive p) { return CsgNode{CsgOp::Primitive, std::move(p), 0.0, {}}; }
  static CsgNode union_of(std::vector<CsgNode> c) { return {CsgOp::Union, {}, 0.0, std::move(c)}; }
  static CsgNode intersection_of(std::vector<CsgNode> c) {
    return {CsgOp::Intersection, {}, 0.0, std::move(c)};
  }
  static CsgNode complement(CsgNode c) { return {CsgOp::Complement, {}, 0.0, {std::move(c)}}; }
  /// Zero set moves to the `amount` level set of the child (f - amount).
  static CsgNode offset_by(CsgNode c, double amount) {
    return {CsgOp::Offset, {}, amount, {std::move(c)}};
  }
};

/// Validates the tree and compiles it into a field. Union is min, intersection is
/// max, complement is negation; gradients follow the active child. Throws
/// InvalidPrimitive.
std::unique_ptr<ImplicitSurface> build_csg_field(const CsgNode& root);

/// Unit sphere at the origin with a spherical dent carved into it near the pole;
/// the test fixture for comparing smoothing schemes.
CsgNode dented_sphere(const Vec3& dent_direction, double dent_radius, double dent_depth);

} // namespace geoexp
