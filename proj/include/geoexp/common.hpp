#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace geoexp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Tri = std::array<int, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  DegenerateGradient,
  NoConvergence,
  InvalidPrimitive,
  EmptyInput,
  AntipodalNormals,
  AlignmentProbeFailed,
  PathAborted,
  SeedFailure,
  TraceFailure,
  SolveFailure,
  DegenerateGrid,
  OutOfDisc,
  TriangulationFailure,
  EmptyCandidates,
  DegenerateTriangle,
  OverlapViolation,
  TransitionLost,
  IoError,
  InvalidConfig,
};

std::string_view error_name(ErrorCode code);

// Numerical failures map to exit code 3, I/O to 2, configuration to 4.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::string_view name() const { return error_name(code_); }

private:
  ErrorCode code_;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Wraps an angle to [0, 2pi).
double wrap_angle_positive(double a);

} // namespace geoexp
