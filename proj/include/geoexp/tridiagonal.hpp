#pragma once

#include <cstddef>
#include <vector>

#include "geoexp/common.hpp"

namespace geoexp {

/// Thomas algorithm for a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]
/// (a[0] and c[n-1] ignored). T is any vector-space value type (double, Vec3).
/// No pivoting: intended for diagonally dominant systems.
template <class T>
std::vector<T> solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<double>& c, const std::vector<T>& d) {
  const std::size_t n = d.size();
  std::vector<double> cp(n);
  std::vector<T> dp(n);
  if (n == 0) return dp;
  double beta = b[0];
  cp[0] = n > 1 ? c[0] / beta : 0.0;
  dp[0] = d[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = b[i] - a[i] * cp[i - 1];
    cp[i] = i + 1 < n ? c[i] / beta : 0.0;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) dp[i] = dp[i] - cp[i] * dp[i + 1];
  return dp;
}

/// Periodic tridiagonal system: like solve_tridiagonal, with the corner entries
/// a[0] (row 0, column n-1) and c[n-1] (row n-1, column 0). Solved with a
/// Sherman-Morrison rank-one correction. Requires n >= 3.
template <class T>
std::vector<T> solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                        const std::vector<double>& c, const std::vector<T>& d) {
  const std::size_t n = d.size();
  const double alpha = c[n - 1];  // bottom-left corner
  const double beta = a[0];       // top-right corner
  const double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;
  std::vector<T> x = solve_tridiagonal<T>(a, bb, c, d);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const std::vector<double> z = solve_tridiagonal<double>(a, bb, c, u);
  const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
  const T factor = (x[0] + beta * x[n - 1] / gamma) / denom;
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] - z[i] * factor;
  return x;
}

} // namespace geoexp
