#pragma once

#include <vector>

#include "geoexp/common.hpp"

namespace geoexp {

/// phi_i: signed angle, counter-clockwise about n_{i+1}, from t_{i+1} to t_i
/// transported into the tangent plane at i+1 (indices mod m). A flat front of m
/// equally spaced directions gives -2 pi / m everywhere.
std::vector<double> change_in_angles(const std::vector<Vec3>& points, const std::vector<Vec3>& tangents,
                                     const std::vector<Vec3>& normals);

/// R_i = theta_i + phi_i - theta_{i+1} + 2 pi / m.
std::vector<double> wedge_holonomy(const std::vector<double>& theta, const std::vector<double>& phi);

struct SmoothingSolve {
  std::vector<double> theta;
  double kappa = 0.0;
  double residual = 0.0;
};

/// Phi_i = wrap(phi_{i-1}) - wrap(phi_i).
std::vector<double> angle_differences(const std::vector<double>& phi);

/// y = L x for the periodic 1D Laplacian (2 on the diagonal, -1 off it).
std::vector<double> apply_laplacian(const std::vector<double>& x);

/// Solves (L + I / kappa) x = rhs with a cyclic tridiagonal elimination and
/// checks the residual. Throws SolveFailure, InvalidConfig.
SmoothingSolve solve_regularized(const std::vector<double>& rhs, double kappa);

/// Minimizer of sum_i R_i^2 + |Theta|^2 / kappa.
SmoothingSolve wedge_smoothing_solve(const std::vector<double>& phi, double kappa);

/// Outermost-strip variant: right-hand side Phi_j - Phi_{j-1} - L Theta_{j-1}.
/// Grows with the step index; kept to demonstrate that.
SmoothingSolve strip_smoothing_solve(const std::vector<double>& phi_current, const std::vector<double>& phi_previous,
                                     const std::vector<double>& theta_previous, double kappa);

} // namespace geoexp
