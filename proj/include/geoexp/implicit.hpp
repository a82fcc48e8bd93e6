#pragma once

#include <atomic>
#include <cstdint>

#include "geoexp/common.hpp"

namespace geoexp {

struct EvalCounters {
  std::uint64_t values = 0;
  std::uint64_t gradients = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return values + gradients; }
};

/// A scalar field whose zero level set is the surface of interest. Negative inside.
///
/// Implementations override `value` and optionally `gradient`; callers go through
/// `eval` / `raw_gradient`, which also maintain the query counters reported in
/// run manifests. Providers are immutable after construction and safe to query
/// from multiple threads.
class ImplicitSurface {
public:
  ImplicitSurface() = default;
  ImplicitSurface(const ImplicitSurface&) = delete;
  ImplicitSurface& operator=(const ImplicitSurface&) = delete;
  virtual ~ImplicitSurface() = default;

  double eval(const Vec3& x) const {
    values_.fetch_add(1, std::memory_order_relaxed);
    return value(x);
  }

  Vec3 raw_gradient(const Vec3& x) const {
    gradients_.fetch_add(1, std::memory_order_relaxed);
    return gradient(x);
  }

  [[nodiscard]] EvalCounters counters() const noexcept {
    return {values_.load(std::memory_order_relaxed), gradients_.load(std::memory_order_relaxed)};
  }
  void reset_counters() const noexcept {
    values_.store(0, std::memory_order_relaxed);
    gradients_.store(0, std::memory_order_relaxed);
  }

  /// Finite-difference step used by the default gradient (unit-cube scale).
  static constexpr double kGradientStep = 1e-6;

protected:
  virtual double value(const Vec3& x) const = 0;
  /// Central differences unless overridden with an analytic gradient.
  virtual Vec3 gradient(const Vec3& x) const;

private:
  mutable std::atomic<std::uint64_t> values_{0};
  mutable std::atomic<std::uint64_t> gradients_{0};
};

struct SmoothingConfig {
  double epsilon = 1e-4;
  int sample_count = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ProjectionConfig {
  double tolerance = 1e-10;
  int max_iterations = 100;

  void validate() const;
};

enum class GradientMode { Smoothed, Raw };

/// Ball-averaged gradient estimated from `sample_count` uniform samples in the
/// epsilon-ball around x. The sample positions depend only on (seed, x).
Vec3 smoothed_gradient(const ImplicitSurface& surface, const Vec3& x, const SmoothingConfig& cfg);

/// Unit normal from the smoothed gradient. Throws DegenerateGradient when the
/// gradient norm is at most 1e-12.
Vec3 normal(const ImplicitSurface& surface, const Vec3& x, const SmoothingConfig& cfg);

/// Generalized Newton projection onto the zero set. f and the gradient are both
/// evaluated at the current iterate. Throws NoConvergence.
Vec3 project(const ImplicitSurface& surface, const Vec3& x, const ProjectionConfig& cfg,
             const SmoothingConfig& smoothing, GradientMode mode = GradientMode::Smoothed);

/// Bundles a surface with the configuration every geometric query needs.
struct SurfaceView {
  const ImplicitSurface* surface = nullptr;
  SmoothingConfig smoothing{};
  ProjectionConfig projection{};
  GradientMode mode = GradientMode::Smoothed;

  SurfaceView() = default;
  explicit SurfaceView(const ImplicitSurface& s, SmoothingConfig sm = {}, ProjectionConfig pr = {},
                       GradientMode md = GradientMode::Smoothed)
      : surface(&s), smoothing(sm), projection(pr), mode(md) {}

  [[nodiscard]] double value(const Vec3& x) const { return surface->eval(x); }
  [[nodiscard]] Vec3 gradient(const Vec3& x) const;
  [[nodiscard]] Vec3 normal(const Vec3& x) const;
  [[nodiscard]] Vec3 project(const Vec3& x) const;
};

} // namespace geoexp
