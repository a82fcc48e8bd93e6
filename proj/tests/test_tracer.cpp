#include "doctest.h"

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "geoexp/distortion.hpp"
#include "geoexp/parallel.hpp"
#include "geoexp/tracer.hpp"

using namespace geoexp;

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

// Rodrigues form of the smallest rotation taking a to b (a, b unit, not opposite).
Mat3 rodrigues(const Vec3& a, const Vec3& b) {
  const Vec3 v = a.cross(b);
  const double c = a.dot(b);
  return Mat3::Identity() + skew(v) + skew(v) * skew(v) / (1.0 + c);
}

double arc_on_unit_sphere(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

bool bitwise_equal(const TraceResult& a, const TraceResult& b) {
  if (a.m() != b.m() || a.phi != b.phi || a.theta != b.theta || a.substeps != b.substeps) return false;
  for (int i = 0; i < a.m(); ++i) {
    if (a.points[i].size() != b.points[i].size()) return false;
    for (std::size_t j = 0; j < a.points[i].size(); ++j)
      if (a.points[i][j] != b.points[i][j] || a.tangents[i][j] != b.tangents[i][j]) return false;
  }
  return true;
}

} // namespace

TEST_CASE("seed frame examples") {
  auto plane = fixtures::plane();
  const SurfaceView pv(*plane);
  auto f = seed_frame(pv, Vec3(0, 0, 0.5));
  CHECK(f.origin == Vec3(0, 0, 0));
  CHECK(f.normal == Vec3(0, 0, 1));
  CHECK(f.e1 == Vec3(1, 0, 0));
  CHECK((f.e2 - Vec3(0, 1, 0)).norm() < 1e-15);

  auto sphere = fixtures::unit_sphere();
  f = seed_frame(SurfaceView(*sphere), Vec3(0, 0, 3));
  CHECK((f.origin - Vec3(0, 0, 1)).norm() <= 1e-4);
  CHECK(std::abs(f.origin.norm() - 1.0) <= 1e-10);
  f = seed_frame(SurfaceView(*sphere, {}, {}, GradientMode::Raw), Vec3(0, 0, 3));
  CHECK(f.origin == Vec3(0, 0, 1));

  // Reference axis parallel to the normal falls back to another axis.
  f = seed_frame(pv, Vec3(0.1, 0.2, 0.3), Vec3::UnitZ());
  CHECK(std::abs(f.e1.norm() - 1.0) < 1e-12);
  CHECK(std::abs(f.e1.dot(f.normal)) < 1e-12);
}

TEST_CASE("seed frames are orthonormal and right-handed on the torus") {
  auto torus = fixtures::torus();
  const SurfaceView view(*torus);
  CounterRng rng(13);
  for (int k = 0; k < 100; ++k) {
    const auto f = seed_frame(view, fixtures::random_point(rng));
    CHECK(std::abs(f.e1.dot(f.normal)) <= 1e-10);
    CHECK(std::abs(f.e2.dot(f.normal)) <= 1e-10);
    CHECK(std::abs(f.e1.dot(f.e2)) <= 1e-10);
    CHECK(std::abs(f.e1.norm() - 1) <= 1e-10);
    CHECK(std::abs(f.e2.norm() - 1) <= 1e-10);
    CHECK((f.e1.cross(f.e2) - f.normal).norm() <= 1e-10);
  }
}

TEST_CASE("initial tangents") {
  TangentFrame f;
  const auto t = initial_tangents(f, 4);
  const Vec3 want[4] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  for (int i = 0; i < 4; ++i) CHECK((t[i] - want[i]).norm() < 1e-15);

  auto torus = fixtures::torus();
  const auto frame = seed_frame(SurfaceView(*torus), Vec3(0.85, 0.1, 0.05));
  const auto t50 = initial_tangents(frame, 50);
  for (int i = 0; i < 50; ++i) {
    CHECK(std::abs(t50[i].norm() - 1.0) < 1e-12);
    CHECK(std::abs(t50[i].dot(frame.normal)) < 1e-12);
    const Vec3& a = t50[i];
    const Vec3& b = t50[(i + 1) % 50];
    const double gap = std::atan2(a.cross(b).dot(frame.normal), a.dot(b));
    CHECK(gap == doctest::Approx(kTwoPi / 50).epsilon(1e-12));
  }
  CHECK_THROWS_AS(initial_tangents(f, 2), Error);
}

TEST_CASE("transport rotation") {
  CHECK(transport_rotation(Vec3(0, 0, 1), Vec3(0, 0, 1)) == Mat3::Identity());
  const Mat3 r = transport_rotation(Vec3(0, 0, 1), Vec3(1, 0, 0));
  CHECK((r * Vec3(1, 0, 0) - Vec3(0, 0, -1)).norm() < 1e-15);
  CHECK((r - rodrigues(Vec3(0, 0, 1), Vec3(1, 0, 0))).norm() < 1e-15);

  CounterRng rng(17);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a = fixtures::random_unit(rng), b = fixtures::random_unit(rng);
    if (a.dot(b) <= -1.0 + 1e-9) continue;
    const Mat3 q = transport_rotation(a, b);
    CHECK((q.transpose() * q - Mat3::Identity()).norm() <= 1e-12);
    CHECK((q * a - b).norm() <= 1e-12);
    CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    if (a.dot(b) > -0.9) CHECK((q - rodrigues(a, b)).norm() <= 1e-10);
  }
  try {
    (void)transport_rotation(Vec3(0, 0, 1), Vec3(0, 0, -1));
    FAIL("expected AntipodalNormals");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AntipodalNormals);
  }
}

TEST_CASE("alignment solve") {
  auto plane = fixtures::plane();
  CHECK(solve_alignment(SurfaceView(*plane), Vec3::Zero(), Vec3::UnitX(), 0.3, 0.7) == 0.3);

  // Sphere: the probe at distance l has normal angle atan(l), so cos = s at l = 1.
  auto sphere = fixtures::unit_sphere();
  const SurfaceView raw(*sphere, {}, {}, GradientMode::Raw);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(solve_alignment(raw, Vec3(0, 0, 1), Vec3(1, 0, 0), 2.0, s) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(solve_alignment(raw, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.5, s) == 0.5);
  const SurfaceView smooth(*sphere);
  CHECK(solve_alignment(smooth, Vec3(0, 0, 1), Vec3(1, 0, 0), 2.0, s) == doctest::Approx(1.0).epsilon(1e-3));

  // Capsule of radius r around z: probes on the cylinder reach cos = s at l = r.
  auto capsule = fixtures::csg(CapsulePrim{Vec3(0, 0, -1), Vec3(0, 0, 1), 0.05});
  const SurfaceView cap(*capsule, {}, {}, GradientMode::Raw);
  CHECK(solve_alignment(cap, Vec3(0.05, 0, 0), Vec3(0, 1, 0), 0.1, s) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("full step on the plane is exact") {
  auto plane = fixtures::plane();
  const SurfaceView view(*plane);
  TraceParams params;
  const Vec3 t = Vec3(3, 4, 0).normalized();
  const auto r = full_step(view, Vec3(0.1, 0.2, 0), t, 0.05, params);
  CHECK((r.point - (Vec3(0.1, 0.2, 0) + 0.05 * t)).norm() < 1e-15);
  CHECK((r.tangent - t).norm() < 1e-15);
  CHECK(r.substeps == 1);
}

TEST_CASE("full step on the sphere follows the great circle") {
  auto sphere = fixtures::unit_sphere();
  const SurfaceView view(*sphere);
  for (bool sub : {true, false}) {
    TraceParams params;
    params.substepping = sub;
    const auto r = full_step(view, Vec3(0, 0, 1), Vec3(1, 0, 0), 0.01, params);
    const double arc = arc_on_unit_sphere(Vec3(0, 0, 1), r.point);
    CHECK(arc >= 0.99 * 0.01);
    CHECK(arc <= 1.01 * 0.01);
    CHECK(std::abs(r.tangent.norm() - 1.0) < 1e-12);
    CHECK(std::abs(r.tangent.dot(view.normal(r.point))) <= 1e-8);
  }
}

TEST_CASE("vanishing projected steps abort the path") {
  // Zero set is a single point: every probe projects straight back onto it.
  fixtures::LambdaSurface point([](const Vec3& x) { return x.norm(); },
                                [](const Vec3& x) { return Vec3(x / x.norm()); });
  const SurfaceView view(point);
  try {
    (void)full_step(view, Vec3::Zero(), Vec3::UnitX(), 0.01, TraceParams{});
    FAIL("expected PathAborted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PathAborted);
  }
}

TEST_CASE("substep limit aborts the path") {
  auto capsule = fixtures::csg(CapsulePrim{Vec3(0, 0, -1), Vec3(0, 0, 1), 0.05});
  TraceParams params;
  params.max_substeps = 1;
  try {
    (void)full_step(SurfaceView(*capsule), Vec3(0.05, 0, 0), Vec3(0, 1, 0), 0.1, params);
    FAIL("expected PathAborted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PathAborted);
  }
}

TEST_CASE("substep counts: sphere never hits the alignment limit, the thin capsule does") {
  auto sphere = fixtures::unit_sphere();
  const SurfaceView view(*sphere);
  const double s = TraceParams{}.alignment_cosine;
  for (double h : {0.001, 0.005, 0.01, 0.02, 0.05, 0.1}) {
    CAPTURE(h);
    // Alignment never limits a step of length h <= 0.1 (the crossing is at 1).
    CHECK(solve_alignment(view, Vec3(0, 0, 1), Vec3(1, 0, 0), h, s) == h);
    const auto r = full_step(view, Vec3(0, 0, 1), Vec3(1, 0, 0), h, TraceParams{});
    // The projected chord is 2 sin(atan(h)/2) = h - 3h^3/8 + ..., and the chord
    // is what gets subtracted from the budget. One substep covers the step
    // unless the 3h^3/8 remainder reaches the substep floor; then exactly one
    // short completion step follows.
    const double remainder = h - 2.0 * std::sin(std::atan(h) / 2.0);
    if (remainder < TraceParams{}.substep_floor) CHECK(r.substeps == 1);
    else CHECK(r.substeps == 2);
  }
  auto capsule = fixtures::csg(CapsulePrim{Vec3(0, 0, -1), Vec3(0, 0, 1), 0.05});
  const auto r = full_step(SurfaceView(*capsule), Vec3(0.05, 0, 0), Vec3(0, 1, 0), 0.1, TraceParams{});
  CHECK(r.substeps >= 2);
}

TEST_CASE("radial trace on the plane is exact") {
  auto plane = fixtures::plane();
  TraceParams params;
  params.m = 4;
  params.n = 2;
  params.h = 0.1;
  const auto tr = radial_trace(SurfaceView(*plane), Vec3(0, 0, 0), params);
  const auto t0 = initial_tangents(tr.frame, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= 2; ++j) CHECK((tr.points[i][j] - (j * 0.1) * t0[i]).norm() <= 1e-15);
  REQUIRE(tr.phi.size() == 3);
  for (const auto& row : tr.phi)
    for (double phi : row) CHECK(phi == doctest::Approx(-kTwoPi / 4).epsilon(1e-14));
  for (const auto& row : tr.theta)
    for (double theta : row) CHECK(std::abs(theta) <= 1e-14);
}

TEST_CASE("radial trace on the sphere matches the analytic exponential map") {
  auto sphere = fixtures::unit_sphere();
  TraceParams params;
  params.m = 50;
  params.n = 100;
  params.h = 0.01;
  params.smoothing = false;
  const auto tr = radial_trace(SurfaceView(*sphere), Vec3(0, 0, 1), params);
  const auto t0 = initial_tangents(tr.frame, params.m);
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < params.m; ++i)
    for (int j = 0; j <= params.n; ++j) {
      const Vec2 u = j * params.h * Vec2(std::cos(kTwoPi * i / params.m), std::sin(kTwoPi * i / params.m));
      sum += (tr.points[i][j] - sphere_exp(tr.frame, u)).norm();
      ++count;
    }
  MESSAGE("mean grid error " << sum / count);
  CHECK(sum / count <= 1e-4);
  (void)t0;
}

TEST_CASE("grid shape has m*n + 1 distinct points") {
  auto torus = fixtures::torus();
  TraceParams params;
  params.m = 12;
  params.n = 5;
  const auto tr = radial_trace(SurfaceView(*torus), Vec3(0.85, 0, 0), params);
  std::set<std::array<double, 3>> distinct;
  for (const auto& curve : tr.points) {
    CHECK(curve.size() == 6);
    for (const auto& q : curve) distinct.insert({q.x(), q.y(), q.z()});
  }
  CHECK(distinct.size() == 12 * 5 + 1);
  CHECK(tr.complete_steps == 5);
  CHECK(tr.aborted_paths == 0);
}

TEST_CASE("trace invariants on sphere and torus") {
  std::vector<std::pair<std::unique_ptr<ImplicitSurface>, Vec3>> cases;
  cases.emplace_back(fixtures::unit_sphere(), Vec3(0.2, 0.1, 1.0));
  cases.emplace_back(fixtures::torus(), Vec3(0.85, 0, 0));
  cases.emplace_back(fixtures::torus(), Vec3(0.6, 0, 0.25));
  for (const auto& [surface, seed] : cases) {
    for (bool smoothing : {true, false}) {
      const SurfaceView view(*surface);
      TraceParams params;
      params.m = 40;
      params.n = 20;
      params.h = 0.01;
      params.smoothing = smoothing;
      const auto tr = radial_trace(view, seed, params);
      for (int i = 0; i < tr.m(); ++i)
        for (std::size_t j = 0; j < tr.points[i].size(); ++j) {
          const Vec3& q = tr.points[i][j];
          CHECK(std::abs(surface->eval(q)) <= 10 * view.projection.tolerance);
          const Vec3& t = tr.tangents[i][j];
          CHECK(std::abs(t.norm() - 1.0) <= 1e-12);
          CHECK(std::abs(t.dot(view.normal(q))) <= 1e-6);
          if (j > 0) {
            const double chord = (q - tr.points[i][j - 1]).norm();
            CHECK(chord >= 0.5 * params.h);
            CHECK(chord <= 1.05 * params.h);
          }
        }
    }
  }
}

TEST_CASE("trace is bit-identical across runs and thread counts") {
  auto torus = fixtures::torus();
  const SurfaceView view(*torus, SmoothingConfig{1e-4, 10, 99});
  TraceParams params;
  params.m = 30;
  params.n = 15;
  const int before = thread_limit();
  set_thread_limit(1);
  const auto a = radial_trace(view, Vec3(0.85, 0.05, 0.0), params);
  set_thread_limit(4);
  const auto b = radial_trace(view, Vec3(0.85, 0.05, 0.0), params);
  set_thread_limit(before);
  CHECK(bitwise_equal(a, b));
}

TEST_CASE("trace failures") {
  fixtures::LambdaSurface positive([](const Vec3& x) { return 1.0 + x.squaredNorm(); },
                                   [](const Vec3& x) { return Vec3(2.0 * x); });
  try {
    (void)radial_trace(SurfaceView(positive), Vec3(0.1, 0, 0), TraceParams{});
    FAIL("expected SeedFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SeedFailure);
  }
  // Every curve stalls on a point-like zero set.
  fixtures::LambdaSurface point([](const Vec3& x) { return x.norm(); },
                                [](const Vec3& x) { return x.norm() > 0 ? Vec3(x / x.norm()) : Vec3(0, 0, 1); });
  try {
    (void)radial_trace(SurfaceView(point, {}, {}, GradientMode::Raw), Vec3(0.1, 0, 0), TraceParams{});
    FAIL("expected TraceFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TraceFailure);
  }
  TraceParams bad;
  bad.m = 2;
  auto plane = fixtures::plane();
  try {
    (void)radial_trace(SurfaceView(*plane), Vec3::Zero(), bad);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
  }
  bad = {};
  bad.alignment_cosine = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("truncated curves clamp the complete step count") {
  // A box corner is within reach of some curves: the trace keeps going and
  // reports the shortest curve.
  auto box = fixtures::csg(BoxPrim{Vec3::Zero(), Vec3(0.5, 0.5, 0.5)});
  TraceParams params;
  params.m = 24;
  params.n = 40;
  params.h = 0.01;
  try {
    const auto tr = radial_trace(SurfaceView(*box), Vec3(0.2, 0.2, 0.6), params);
    CHECK(tr.complete_steps <= params.n);
    for (const auto& c : tr.points) CHECK(static_cast<int>(c.size()) >= tr.complete_steps + 1);
    CHECK(tr.aborted_paths * 10 <= params.m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TraceFailure);
  }
}
