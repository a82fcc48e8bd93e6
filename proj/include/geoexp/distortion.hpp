#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geoexp/log_map.hpp"

namespace geoexp {

struct EnergyReport {
  std::vector<int> triangle;    ///< index of each measured triangle
  std::vector<double> energy;   ///< per measured triangle
  std::vector<double> area;     ///< 3D area of each measured triangle
  double mean = 0.0;            ///< weighted by 3D area
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  int degenerate = 0;           ///< uv area below 1e-14, skipped
  int flipped = 0;              ///< negative Jacobian determinant, measured but counted
};

/// Per-triangle Jacobian from the uv triangle to the 3D triangle laid out
/// isometrically in the plane. Returns false for a degenerate uv triangle.
bool triangle_jacobian(const Vec2& u0, const Vec2& u1, const Vec2& u2, const Vec3& p0, const Vec3& p1,
                       const Vec3& p2, Mat2& jacobian);

/// |J|_F^2 + |J^-1|_F^2; 4 for an isometry.
EnergyReport symmetric_dirichlet(const std::vector<Vec2>& uv, const std::vector<Vec3>& positions,
                                 const std::vector<Tri>& triangles);
EnergyReport symmetric_dirichlet(const MapMesh& mesh);

/// (sigma_1 - sigma_2)^2 / 2; zero exactly for similarities.
EnergyReport lscm_energy(const std::vector<Vec2>& uv, const std::vector<Vec3>& positions,
                         const std::vector<Tri>& triangles);
EnergyReport lscm_energy(const MapMesh& mesh);

struct ExpErrorSamples {
  int interior = 2000;
  int boundary = 500;
  std::uint64_t seed = 0;
};

struct ExpErrorResult {
  double mean_error = 0.0;
  double max_error = 0.0;
  double traced_curve_error = 0.0;  ///< mean over the traced points of radial curve 0
  double radius = 0.0;
  std::uint64_t evaluations = 0;     ///< implicit queries, filled by sphere_error_experiment
};

/// Exact exponential map for comparison, given the chart's seed frame.
using ExactExpMap = std::function<Vec3(const TangentFrame&, const Vec2&)>;

/// Traces and fits a map, then averages |q(u) - exact(u)| over uniform disc
/// samples and boundary samples.
ExpErrorResult exp_map_error(const SurfaceView& surface, const Vec3& seed_point, const TraceParams& params,
                             const ExactExpMap& exact, const ExpErrorSamples& samples = {});

/// The unit-sphere experiment at p = (0, 0, 1) against cos|u| p + sin|u| u/|u|.
ExpErrorResult sphere_error_experiment(int m, int n, double h, bool substepping, bool smoothing,
                                       const ExpErrorSamples& samples = {});

/// Analytic exponential map of the unit sphere at frame.origin; the frame is
/// re-orthogonalized against the exact normal first.
Vec3 sphere_exp(const TangentFrame& frame, const Vec2& u);

} // namespace geoexp
