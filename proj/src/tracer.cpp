#include "geoexp/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoexp/holonomy.hpp"
#include "geoexp/parallel.hpp"

namespace geoexp {

void TraceParams::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (m < 3) fail("m must be at least 3");
  if (n < 1) fail("n must be at least 1");
  if (!(h > 0.0) || !std::isfinite(h)) fail("h must be positive");
  if (!(alignment_cosine > 0.0 && alignment_cosine < 1.0)) fail("alignment cosine must be in (0, 1)");
  if (!(substep_floor > 0.0)) fail("substep floor must be positive");
  if (max_substeps < 1) fail("max_substeps must be at least 1");
  if (!(kappa > 0.0)) fail("kappa must be positive");
  if (!(reference_axis.norm() > 0.0)) fail("reference axis must be non-zero");
}

TangentFrame seed_frame(const SurfaceView& surface, const Vec3& p_raw, const Vec3& reference_axis) {
  TangentFrame f;
  f.origin = surface.project(p_raw);
  f.normal = surface.normal(f.origin);
  const Vec3 axis = reference_axis.normalized();
  Vec3 r = axis - axis.dot(f.normal) * f.normal;
  if (r.norm() < 1e-6) {
    // Next coordinate axis after the dominant one of the reference.
    int k = 0;
    axis.cwiseAbs().maxCoeff(&k);
    const Vec3 alt = Vec3::Unit((k + 1) % 3);
    r = alt - alt.dot(f.normal) * f.normal;
  }
  f.e1 = r.normalized();
  f.e2 = f.normal.cross(f.e1).normalized();
  return f;
}

std::vector<Vec3> initial_tangents(const TangentFrame& frame, int m) {
  if (m < 3) throw Error(ErrorCode::InvalidConfig, "m must be at least 3");
  std::vector<Vec3> t(m);
  for (int i = 0; i < m; ++i) {
    const double a = kTwoPi * i / m;
    t[i] = std::cos(a) * frame.e1 + std::sin(a) * frame.e2;
  }
  return t;
}

Mat3 transport_rotation(const Vec3& n_from, const Vec3& n_to) {
  const double c = n_from.dot(n_to);
  if (c <= -1.0 + 1e-9) throw Error(ErrorCode::AntipodalNormals, "normals are opposite");
  const Vec3 v = n_from.cross(n_to);
  const double s = v.norm();
  if (s < 1e-12 && c > 0.0) return Mat3::Identity();
  const double alpha = std::acos(std::clamp(c, -1.0, 1.0));
  return Eigen::AngleAxisd(alpha, v / s).toRotationMatrix();
}

double solve_alignment(const SurfaceView& surface, const Vec3& q, const Vec3& t, double h_max, double s) {
  const Vec3 n0 = surface.normal(q);
  auto g = [&](double l) {
    try {
      return n0.dot(surface.normal(surface.project(q + l * t))) - s;
    } catch (const Error& e) {
      throw Error(ErrorCode::AlignmentProbeFailed, e.what());
    }
  };
  constexpr int kScan = 32;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int k = 1; k <= kScan; ++k) {
    const double l = h_max * k / kScan;
    if (g(l) < 0.0) {
      lo = h_max * (k - 1) / kScan;
      hi = l;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) return h_max;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

[[noreturn]] void abort_path(const std::string& why) { throw Error(ErrorCode::PathAborted, why); }

// Projects and transports one substep; geometric failures abort the path.
void advance(const SurfaceView& surface, Vec3& q, Vec3& t, Vec3& nq, double length, double& moved) {
  Vec3 next, n_next;
  try {
    next = surface.project(q + length * t);
    n_next = surface.normal(next);
  } catch (const Error& e) {
    abort_path(e.what());
  }
  Mat3 rot;
  try {
    rot = transport_rotation(nq, n_next);
  } catch (const Error& e) {
    abort_path(e.what());
  }
  Vec3 moved_t = rot * t;
  moved_t -= moved_t.dot(n_next) * n_next;
  moved = (next - q).norm();
  q = next;
  t = moved_t.normalized();
  nq = n_next;
}

} // namespace

StepResult full_step(const SurfaceView& surface, const Vec3& q0, const Vec3& t0, double h, const TraceParams& params) {
  Vec3 q = q0, t = t0, nq;
  try {
    nq = surface.normal(q);
  } catch (const Error& e) {
    abort_path(e.what());
  }
  StepResult out;
  if (!params.substepping) {
    double moved = 0.0;
    advance(surface, q, t, nq, h, moved);
    return {q, t, 1};
  }

  double remaining = h;
  int short_steps = 0;
  int count = 0;
  while (remaining >= params.substep_floor) {
    if (count >= params.max_substeps) abort_path("substep limit reached");
    double limit = remaining;
    double length = 0.0;
    for (int attempt = 0;; ++attempt) {
      try {
        length = solve_alignment(surface, q, t, limit, params.alignment_cosine);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AlignmentProbeFailed && e.code() != ErrorCode::DegenerateGradient) throw;
        if (attempt == 4) abort_path(e.what());
        limit *= 0.5;
      }
    }
    double moved = 0.0;
    advance(surface, q, t, nq, length, moved);
    ++count;
    if (moved < params.substep_floor) {
      if (++short_steps >= 2) abort_path("projected step vanished");
    } else {
      short_steps = 0;
    }
    remaining -= moved;
  }
  return {q, t, count};
}

TraceResult radial_trace(const SurfaceView& surface, const Vec3& p_raw, const TraceParams& params) {
  params.validate();
  TraceResult res;
  res.params = params;
  try {
    res.frame = seed_frame(surface, p_raw, params.reference_axis);
  } catch (const Error& e) {
    throw Error(ErrorCode::SeedFailure, e.what());
  }
  const int m = params.m;
  const std::vector<Vec3> t0 = initial_tangents(res.frame, m);
  res.points.assign(m, {res.frame.origin});
  res.tangents.resize(m);
  res.substeps.assign(m, {0});
  for (int i = 0; i < m; ++i) res.tangents[i] = {t0[i]};

  res.phi.push_back(std::vector<double>(m, -kTwoPi / m));
  res.theta.push_back(std::vector<double>(m, 0.0));

  std::vector<char> alive(m, 1);
  std::vector<StepResult> step(m);
  std::vector<Vec3> normals(m), front(m), moved(m);
  bool intact = true;  // all curves alive so far; smoothing stops after the first truncation
  for (int j = 0; j < params.n; ++j) {
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
      if (!alive[i]) return;
      try {
        step[i] = full_step(surface, res.points[i].back(), res.tangents[i].back(), params.h, params);
        normals[i] = surface.normal(step[i].point);
      } catch (const Error&) {
        alive[i] = 0;
      }
    });
    const int live = static_cast<int>(std::count(alive.begin(), alive.end(), 1));
    if (live < m) intact = false;
    if (live == 0) break;

    if (intact) {
      for (int i = 0; i < m; ++i) {
        front[i] = step[i].point;
        moved[i] = step[i].tangent;
      }
      std::vector<double> phi, theta(m, 0.0);
      try {
        phi = change_in_angles(front, moved, normals);
      } catch (const Error&) {
        intact = false;
      }
      if (intact) {
        if (params.smoothing) {
          SmoothingSolve sol = params.scheme == SmoothingScheme::Wedge
                                   ? wedge_smoothing_solve(phi, params.kappa)
                                   : strip_smoothing_solve(phi, res.phi.back(), res.theta.back(), params.kappa);
          theta = std::move(sol.theta);
          for (int i = 0; i < m; ++i) step[i].tangent = rotate_in_plane(step[i].tangent, normals[i], theta[i]);
        }
        res.phi.push_back(std::move(phi));
        res.theta.push_back(std::move(theta));
      }
    }
    for (int i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      res.points[i].push_back(step[i].point);
      res.tangents[i].push_back(step[i].tangent);
      res.substeps[i].push_back(step[i].substeps);
    }
  }

  res.aborted_paths = 0;
  res.complete_steps = params.n;
  for (int i = 0; i < m; ++i) {
    const int steps = static_cast<int>(res.points[i].size()) - 1;
    if (steps < params.n) ++res.aborted_paths;
    res.complete_steps = std::min(res.complete_steps, steps);
  }
  if (res.aborted_paths * 10 > m) {
    std::ostringstream os;
    os << res.aborted_paths << " of " << m << " radial curves were truncated";
    throw Error(ErrorCode::TraceFailure, os.str());
  }
  if (res.complete_steps < 1) throw Error(ErrorCode::TraceFailure, "no radial curve completed a step");
  return res;
}

} // namespace geoexp
