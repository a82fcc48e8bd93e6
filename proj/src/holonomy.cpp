#include "geoexp/holonomy.hpp"

#include <cmath>

#include "geoexp/tracer.hpp"
#include "geoexp/tridiagonal.hpp"

namespace geoexp {

std::vector<double> change_in_angles(const std::vector<Vec3>& points, const std::vector<Vec3>& tangents,
                                     const std::vector<Vec3>& normals) {
  const std::size_t m = tangents.size();
  if (m < 3 || normals.size() != m || (!points.empty() && points.size() != m))
    throw Error(ErrorCode::InvalidConfig, "front needs matching lists of at least 3 entries");
  std::vector<double> phi(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = (i + 1) % m;
    const Vec3 moved = transport_rotation(normals[i], normals[k]) * tangents[i];
    phi[i] = std::atan2(tangents[k].cross(moved).dot(normals[k]), tangents[k].dot(moved));
  }
  return phi;
}

std::vector<double> wedge_holonomy(const std::vector<double>& theta, const std::vector<double>& phi) {
  const std::size_t m = phi.size();
  if (theta.size() != m || m == 0) throw Error(ErrorCode::InvalidConfig, "theta and phi lengths differ");
  std::vector<double> r(m);
  const double base = kTwoPi / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = theta[i] + phi[i] - theta[(i + 1) % m] + base;
  return r;
}

std::vector<double> angle_differences(const std::vector<double>& phi) {
  const std::size_t m = phi.size();
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i) d[i] = wrap_angle(phi[(i + m - 1) % m]) - wrap_angle(phi[i]);
  return d;
}

std::vector<double> apply_laplacian(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = 2.0 * x[i] - x[(i + m - 1) % m] - x[(i + 1) % m];
  return y;
}

SmoothingSolve solve_regularized(const std::vector<double>& rhs, double kappa) {
  const std::size_t m = rhs.size();
  if (m < 3) throw Error(ErrorCode::InvalidConfig, "smoothing needs at least 3 angles");
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidConfig, "kappa must be positive");
  const double diag = 2.0 + 1.0 / kappa;
  const std::vector<double> off(m, -1.0), mid(m, diag);
  SmoothingSolve out;
  out.kappa = kappa;
  out.theta = solve_cyclic_tridiagonal<double>(off, mid, off, rhs);

  std::vector<double> lx = apply_laplacian(out.theta);
  double res2 = 0.0, rhs2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = lx[i] + out.theta[i] / kappa - rhs[i];
    res2 += r * r;
    rhs2 += rhs[i] * rhs[i];
  }
  out.residual = std::sqrt(res2);
  if (!(out.residual <= 1e-10 * std::sqrt(rhs2) + 1e-12))
    throw Error(ErrorCode::SolveFailure, "smoothing residual " + std::to_string(out.residual));
  return out;
}

SmoothingSolve wedge_smoothing_solve(const std::vector<double>& phi, double kappa) {
  return solve_regularized(angle_differences(phi), kappa);
}

SmoothingSolve strip_smoothing_solve(const std::vector<double>& phi_current, const std::vector<double>& phi_previous,
                                     const std::vector<double>& theta_previous, double kappa) {
  const std::size_t m = phi_current.size();
  if (phi_previous.size() != m || theta_previous.size() != m)
    throw Error(ErrorCode::InvalidConfig, "strip smoothing inputs differ in length");
  const std::vector<double> cur = angle_differences(phi_current);
  const std::vector<double> prev = angle_differences(phi_previous);
  const std::vector<double> lt = apply_laplacian(theta_previous);
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = cur[i] - prev[i] - lt[i];
  return solve_regularized(rhs, kappa);
}

} // namespace geoexp
