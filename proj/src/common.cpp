#include "geoexp/common.hpp"

#include <cmath>

namespace geoexp {

std::string_view error_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::DegenerateGradient: return "DegenerateGradient";
  case ErrorCode::NoConvergence: return "NoConvergence";
  case ErrorCode::InvalidPrimitive: return "InvalidPrimitive";
  case ErrorCode::EmptyInput: return "EmptyInput";
  case ErrorCode::AntipodalNormals: return "AntipodalNormals";
  case ErrorCode::AlignmentProbeFailed: return "AlignmentProbeFailed";
  case ErrorCode::PathAborted: return "PathAborted";
  case ErrorCode::SeedFailure: return "SeedFailure";
  case ErrorCode::TraceFailure: return "TraceFailure";
  case ErrorCode::SolveFailure: return "SolveFailure";
  case ErrorCode::DegenerateGrid: return "DegenerateGrid";
  case ErrorCode::OutOfDisc: return "OutOfDisc";
  case ErrorCode::TriangulationFailure: return "TriangulationFailure";
  case ErrorCode::EmptyCandidates: return "EmptyCandidates";
  case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
  case ErrorCode::OverlapViolation: return "OverlapViolation";
  case ErrorCode::TransitionLost: return "TransitionLost";
  case ErrorCode::IoError: return "IoError";
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::IoError: return 2;
  case ErrorCode::InvalidConfig:
  case ErrorCode::InvalidPrimitive:
  case ErrorCode::EmptyInput: return 4;
  default: return 3;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

double wrap_angle_positive(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

} // namespace geoexp
