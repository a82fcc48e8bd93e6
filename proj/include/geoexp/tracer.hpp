#pragma once

#include <cmath>
#include <vector>

#include "geoexp/implicit.hpp"

namespace geoexp {

struct TangentFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();

  /// Tangent-plane coordinates to a 3D vector.
  [[nodiscard]] Vec3 lift(const Vec2& u) const { return u.x() * e1 + u.y() * e2; }
};

enum class SmoothingScheme { Wedge, Strip };

struct TraceParams {
  int m = 50;
  int n = 10;
  double h = 0.01;
  double alignment_cosine = 0.70710678118654752;
  double substep_floor = 1e-6;
  int max_substeps = 64;
  bool substepping = true;
  bool smoothing = true;
  SmoothingScheme scheme = SmoothingScheme::Wedge;  ///< Strip exists only as a diagnostic
  double kappa = 1e3;
  /// Axis whose tangential part becomes e1 of the seed frame.
  Vec3 reference_axis = Vec3::UnitX();

  void validate() const;
};

struct TraceResult {
  TangentFrame frame;
  TraceParams params;
  /// points[i][j], tangents[i][j], substeps[i][j] for curve i and step j. A
  /// truncated curve keeps only the steps it completed.
  std::vector<std::vector<Vec3>> points;
  std::vector<std::vector<Vec3>> tangents;
  std::vector<std::vector<int>> substeps;
  /// phi[j][i] and theta[j][i]; present for every step at which all m curves
  /// were alive. phi is measured before the rotation by theta.
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> theta;
  /// Number of steps every curve completed (n unless some curve was truncated).
  int complete_steps = 0;
  int aborted_paths = 0;

  [[nodiscard]] int m() const { return static_cast<int>(points.size()); }
};

/// Projects p_raw and builds an orthonormal tangent basis. e1 is the normalized
/// rejection of `reference_axis` from the normal (falling back to the next
/// coordinate axis when nearly parallel); e2 = n x e1.
TangentFrame seed_frame(const SurfaceView& surface, const Vec3& p_raw,
                        const Vec3& reference_axis = Vec3::UnitX());

/// t_i = cos(2 pi i / m) e1 + sin(2 pi i / m) e2.
std::vector<Vec3> initial_tangents(const TangentFrame& frame, int m);

/// Smallest rotation taking n_from to n_to. Throws AntipodalNormals.
Mat3 transport_rotation(const Vec3& n_from, const Vec3& n_to);

/// Largest step along t, up to h_max, for which the projected normal still makes
/// a cosine of at least s with n(q). Throws AlignmentProbeFailed when a probe
/// cannot be projected.
double solve_alignment(const SurfaceView& surface, const Vec3& q, const Vec3& t, double h_max, double s);

struct StepResult {
  Vec3 point;
  Vec3 tangent;
  int substeps = 0;
};

/// One outer integration step of length h, split into aligned substeps when
/// params.substepping is set. Throws PathAborted.
StepResult full_step(const SurfaceView& surface, const Vec3& q, const Vec3& t, double h,
                     const TraceParams& params);

/// Traces m radial curves of n steps from the projection of p_raw. Throws
/// SeedFailure (seed cannot be projected) and TraceFailure (more than 10% of the
/// curves truncated, or none completed a step).
TraceResult radial_trace(const SurfaceView& surface, const Vec3& p_raw, const TraceParams& params);

/// Rotates t by angle about n (counter-clockwise seen from the tip of n).
inline Vec3 rotate_in_plane(const Vec3& t, const Vec3& n, double angle) {
  return std::cos(angle) * t + std::sin(angle) * n.cross(t);
}

} // namespace geoexp
