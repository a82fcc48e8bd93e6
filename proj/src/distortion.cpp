#include "geoexp/distortion.hpp"

#include <algorithm>
#include <cmath>

#include "geoexp/csg.hpp"
#include "geoexp/random.hpp"

namespace geoexp {

bool triangle_jacobian(const Vec2& u0, const Vec2& u1, const Vec2& u2, const Vec3& p0, const Vec3& p1,
                       const Vec3& p2, Mat2& jacobian) {
  Mat2 U;
  U.col(0) = u1 - u0;
  U.col(1) = u2 - u0;
  if (std::abs(U.determinant()) * 0.5 < 1e-14) return false;
  const Vec3 a = p1 - p0, b = p2 - p0;
  const double la = a.norm();
  Mat2 X;
  if (la > 0.0) {
    X << la, a.dot(b) / la, 0.0, a.cross(b).norm() / la;
  } else {
    X << 0.0, b.norm(), 0.0, 0.0;
  }
  jacobian = X * U.inverse();
  return true;
}

namespace {

template <class Energy>
EnergyReport measure(const std::vector<Vec2>& uv, const std::vector<Vec3>& positions, const std::vector<Tri>& tris,
                     Energy energy) {
  EnergyReport rep;
  double weighted = 0.0, total_area = 0.0;
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
    const Tri& f = tris[t];
    Mat2 J;
    if (!triangle_jacobian(uv[f[0]], uv[f[1]], uv[f[2]], positions[f[0]], positions[f[1]], positions[f[2]], J)) {
      ++rep.degenerate;
      continue;
    }
    const double det = J.determinant();
    if (det < 0.0) ++rep.flipped;
    const double e = energy(J, det);
    const double area = 0.5 * (positions[f[1]] - positions[f[0]]).cross(positions[f[2]] - positions[f[0]]).norm();
    rep.triangle.push_back(t);
    rep.energy.push_back(e);
    rep.area.push_back(area);
    weighted += area * e;
    total_area += area;
  }
  if (!rep.energy.empty()) {
    std::vector<double> sorted = rep.energy;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    rep.median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
    rep.min = sorted.front();
    rep.max = sorted.back();
    rep.mean = total_area > 0.0 ? weighted / total_area : rep.median;
    rep.mean = std::clamp(rep.mean, rep.min, rep.max);
  }
  return rep;
}

double sd_energy(const Mat2& J, double det) {
  const double f2 = J.squaredNorm();
  return f2 + f2 / (det * det);
}

double conformal_energy(const Mat2& J, double det) {
  return std::max(0.0, 0.5 * (J.squaredNorm() - 2.0 * std::abs(det)));
}

} // namespace

EnergyReport symmetric_dirichlet(const std::vector<Vec2>& uv, const std::vector<Vec3>& positions,
                                 const std::vector<Tri>& triangles) {
  return measure(uv, positions, triangles, sd_energy);
}

EnergyReport symmetric_dirichlet(const MapMesh& mesh) {
  return symmetric_dirichlet(mesh.uv(), mesh.positions(), mesh.triangles());
}

EnergyReport lscm_energy(const std::vector<Vec2>& uv, const std::vector<Vec3>& positions,
                         const std::vector<Tri>& triangles) {
  return measure(uv, positions, triangles, conformal_energy);
}

EnergyReport lscm_energy(const MapMesh& mesh) { return lscm_energy(mesh.uv(), mesh.positions(), mesh.triangles()); }

ExpErrorResult exp_map_error(const SurfaceView& surface, const Vec3& seed_point, const TraceParams& params,
                             const ExactExpMap& exact, const ExpErrorSamples& samples) {
  const TraceResult trace = radial_trace(surface, seed_point, params);
  const LocalMap map = LocalMap::fit(trace);
  const double R = map.radius();

  CounterRng rng(derive_seed(samples.seed, "error-samples"));
  double sum = 0.0, worst = 0.0;
  auto add = [&](const Vec2& u) {
    const double e = (map.eval(u) - exact(map.frame(), u)).norm();
    sum += e;
    worst = std::max(worst, e);
  };
  for (int k = 0; k < samples.interior; ++k) {
    const double r = R * std::sqrt(rng.uniform());
    const double a = kTwoPi * rng.uniform();
    add(Vec2(r * std::cos(a), r * std::sin(a)));
  }
  for (int k = 0; k < samples.boundary; ++k) {
    const double a = kTwoPi * rng.uniform();
    add(Vec2(R * std::cos(a), R * std::sin(a)));
  }
  ExpErrorResult out;
  out.radius = R;
  out.max_error = worst;
  const int count = samples.interior + samples.boundary;
  out.mean_error = count > 0 ? sum / count : 0.0;

  double traced = 0.0;
  const int steps = trace.complete_steps;
  for (int j = 0; j <= steps; ++j)
    traced += (trace.points[0][j] - exact(map.frame(), Vec2(j * params.h, 0.0))).norm();
  out.traced_curve_error = traced / (steps + 1);
  return out;
}

Vec3 sphere_exp(const TangentFrame& frame, const Vec2& u) {
  const Vec3 p = frame.origin.normalized();
  const Vec3 e1 = (frame.e1 - frame.e1.dot(p) * p).normalized();
  const Vec3 e2 = p.cross(e1);
  const Vec3 d = u.x() * e1 + u.y() * e2;
  const double r = d.norm();
  if (r == 0.0) return p;
  return std::cos(r) * p + std::sin(r) * (d / r);
}

ExpErrorResult sphere_error_experiment(int m, int n, double h, bool substepping, bool smoothing,
                                       const ExpErrorSamples& samples) {
  if (!(n * h <= kPi)) throw Error(ErrorCode::InvalidConfig, "n * h must not exceed pi on the unit sphere");
  const auto sphere = build_csg_field(CsgNode::leaf(SpherePrim{Vec3::Zero(), 1.0}));
  SmoothingConfig smooth;
  smooth.seed = derive_seed(samples.seed, "smoothing");
  const SurfaceView view(*sphere, smooth);
  TraceParams params;
  params.m = m;
  params.n = n;
  params.h = h;
  params.substepping = substepping;
  params.smoothing = smoothing;
  ExpErrorResult r = exp_map_error(view, Vec3(0.0, 0.0, 1.0), params, sphere_exp, samples);
  r.evaluations = sphere->counters().total();
  return r;
}

} // namespace geoexp
