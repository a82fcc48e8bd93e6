#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "geoexp/holonomy.hpp"
#include "geoexp/tracer.hpp"

using namespace geoexp;

namespace {

struct Front {
  std::vector<Vec3> points, tangents, normals;
};

// Analytic front at geodesic radius r around the north pole of the unit sphere:
// points exp_p(r t_i), radial geodesic tangents, outward normals.
Front sphere_front(int m, double r) {
  Front f;
  const Vec3 p(0, 0, 1);
  for (int i = 0; i < m; ++i) {
    const double a = kTwoPi * i / m;
    const Vec3 t0(std::cos(a), std::sin(a), 0);
    const Vec3 q = std::cos(r) * p + std::sin(r) * t0;
    f.points.push_back(q);
    f.tangents.push_back(-std::sin(r) * p + std::cos(r) * t0);
    f.normals.push_back(q);
  }
  return f;
}

std::vector<double> random_phi(CounterRng& rng, int m, double noise) {
  std::vector<double> phi(m);
  for (auto& v : phi) v = -kTwoPi / m + noise * (2.0 * rng.uniform() - 1.0);
  return phi;
}

double objective(const std::vector<double>& theta, const std::vector<double>& phi, double kappa) {
  double e = 0.0;
  for (double r : wedge_holonomy(theta, phi)) e += r * r;
  for (double t : theta) e += t * t / kappa;
  return e;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace

TEST_CASE("flat front angles are -2pi/m") {
  Front f;
  for (int i = 0; i < 8; ++i) {
    const double a = kTwoPi * i / 8;
    const Vec3 t(std::cos(a), std::sin(a), 0);
    f.points.push_back(0.3 * t);
    f.tangents.push_back(t);
    f.normals.push_back(Vec3::UnitZ());
  }
  for (double phi : change_in_angles(f.points, f.tangents, f.normals))
    CHECK(phi == doctest::Approx(-kTwoPi / 8).epsilon(1e-14));
}

TEST_CASE("sphere front holonomy matches the cap-sector curvature content") {
  const int m = 50;
  for (double r : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    CAPTURE(r);
    const auto f = sphere_front(m, r);
    const auto phi = change_in_angles(f.points, f.tangents, f.normals);
    const double want = kTwoPi / m * (1.0 - std::cos(r));
    for (double v : phi) CHECK(std::abs(v + kTwoPi / m - want) <= 0.02 * want);
  }
}

TEST_CASE("reversing the traversal negates each angle") {
  auto torus = fixtures::torus();
  TraceParams params;
  params.m = 20;
  params.n = 6;
  params.smoothing = false;
  const SurfaceView view(*torus);
  const auto tr = radial_trace(view, Vec3(0.85, 0, 0), params);
  Front f, g;
  for (int i = 0; i < params.m; ++i) {
    f.points.push_back(tr.points[i].back());
    f.tangents.push_back(tr.tangents[i].back());
    f.normals.push_back(view.normal(tr.points[i].back()));
  }
  for (int i = params.m - 1; i >= 0; --i) {
    g.points.push_back(f.points[i]);
    g.tangents.push_back(f.tangents[i]);
    g.normals.push_back(f.normals[i]);
  }
  const auto a = change_in_angles(f.points, f.tangents, f.normals);
  const auto b = change_in_angles(g.points, g.tangents, g.normals);
  const int m = params.m;
  // Pair (i, i+1) of the reversed list is pair (m-2-i, m-1-i) of the original.
  for (int i = 0; i < m; ++i) CHECK(b[i] == doctest::Approx(-a[((m - 2 - i) % m + m) % m]).epsilon(1e-12));
}

TEST_CASE("antipodal normals propagate") {
  std::vector<Vec3> pts(3, Vec3::Zero()), t{{1, 0, 0}, {0, 1, 0}, {1, 0, 0}}, n{{0, 0, 1}, {0, 0, -1}, {0, 0, 1}};
  try {
    (void)change_in_angles(pts, t, n);
    FAIL("expected AntipodalNormals");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AntipodalNormals);
  }
}

TEST_CASE("wedge holonomy examples") {
  const int m = 6;
  for (double r : wedge_holonomy(std::vector<double>(m, 0.0), std::vector<double>(m, -kTwoPi / m)))
    CHECK(std::abs(r) < 1e-15);
  const auto r = wedge_holonomy({0, 0, 0, 0}, {-1.5, -1.6, -1.5, -1.6});
  const double want[4] = {-1.5 + kPi / 2, -1.6 + kPi / 2, -1.5 + kPi / 2, -1.6 + kPi / 2};
  for (int i = 0; i < 4; ++i) CHECK(r[i] == doctest::Approx(want[i]).epsilon(1e-15));
  CounterRng rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto phi = random_phi(rng, 12, 0.3);
    std::vector<double> theta(12);
    for (auto& t : theta) t = 2.0 * rng.uniform() - 1.0;
    CHECK(sum(wedge_holonomy(theta, phi)) == doctest::Approx(sum(phi) + kTwoPi).epsilon(1e-13));
  }
}

TEST_CASE("wedge smoothing solve") {
  SUBCASE("constant phi gives zero rotation") {
    const auto s = wedge_smoothing_solve(std::vector<double>(10, -0.3), 1e3);
    for (double t : s.theta) CHECK(t == 0.0);
  }
  SUBCASE("dense oracle for the 4x4 system") {
    // phi chosen so that Phi_i = phi_{i-1} - phi_i = (0.1, -0.1, 0.1, -0.1).
    const std::vector<double> phi{-kPi / 2, -kPi / 2 + 0.1, -kPi / 2, -kPi / 2 + 0.1};
    const auto diffs = angle_differences(phi);
    const double want_phi[4] = {0.1, -0.1, 0.1, -0.1};
    for (int i = 0; i < 4; ++i) CHECK(diffs[i] == doctest::Approx(want_phi[i]).epsilon(1e-14));
    const double kappa = 1e3;
    Eigen::Matrix4d a;
    a << 2, -1, 0, -1, -1, 2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2;
    a += Eigen::Matrix4d::Identity() / kappa;
    const Eigen::Vector4d oracle = a.fullPivLu().solve(Eigen::Vector4d(0.1, -0.1, 0.1, -0.1));
    const auto s = wedge_smoothing_solve(phi, kappa);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s.theta[i] - oracle[i]) <= 1e-12);
    CHECK(s.kappa == kappa);
    CHECK(s.residual <= 1e-10 * 0.2 + 1e-12);
  }
  SUBCASE("small kappa: identity dominates") {
    CounterRng rng(5);
    const auto phi = random_phi(rng, 9, 0.2);
    const auto diffs = angle_differences(phi);
    const double kappa = 1e-8;
    const auto s = wedge_smoothing_solve(phi, kappa);
    // Theta = kappa (I + kappa L)^-1 Phi = kappa Phi - kappa^2 L Phi + ..., and |L Phi| <= 4 max|Phi|.
    double max_diff = 0.0;
    for (double d : diffs) max_diff = std::max(max_diff, std::abs(d));
    for (int i = 0; i < 9; ++i) CHECK(std::abs(s.theta[i] - kappa * diffs[i]) <= 4.0 * kappa * kappa * max_diff * 1.01);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(wedge_smoothing_solve({0.1, 0.2}, 1e3), Error);
    CHECK_THROWS_AS(wedge_smoothing_solve({0.1, 0.2, 0.3}, 0.0), Error);
  }
}

TEST_CASE("total holonomy is conserved by smoothing") {
  CounterRng rng(8);
  for (int k = 0; k < 1000; ++k) {
    const int m = 3 + static_cast<int>(rng.uniform() * 60);
    const auto phi = random_phi(rng, m, 0.5);
    const auto s = wedge_smoothing_solve(phi, 1e3);
    const double before = sum(wedge_holonomy(std::vector<double>(m, 0.0), phi));
    const double after = sum(wedge_holonomy(s.theta, phi));
    CHECK(std::abs(before - after) <= 1e-12);
  }
}

TEST_CASE("smoothing reduces the regularized objective") {
  CounterRng rng(9);
  for (int k = 0; k < 1000; ++k) {
    const int m = 3 + static_cast<int>(rng.uniform() * 60);
    const auto phi = random_phi(rng, m, 0.5);
    const double kappa = std::pow(10.0, 6.0 * rng.uniform() - 2.0);
    const auto s = wedge_smoothing_solve(phi, kappa);
    CHECK(objective(s.theta, phi, kappa) <= objective(std::vector<double>(m, 0.0), phi, kappa) + 1e-12);
    // And it is the minimizer: random perturbations never do better.
    auto perturbed = s.theta;
    for (auto& t : perturbed) t += 1e-3 * (2.0 * rng.uniform() - 1.0);
    CHECK(objective(s.theta, phi, kappa) <= objective(perturbed, phi, kappa) + 1e-15);
  }
}

TEST_CASE("constant offsets are invisible and the constant mode stays near zero") {
  CounterRng rng(10);
  for (int k = 0; k < 200; ++k) {
    const int m = 5 + static_cast<int>(rng.uniform() * 40);
    const auto phi = random_phi(rng, m, 0.4);
    const auto s = wedge_smoothing_solve(phi, 1e3);
    auto shifted = s.theta;
    for (auto& t : shifted) t += 0.77;
    const auto a = wedge_holonomy(s.theta, phi), b = wedge_holonomy(shifted, phi);
    for (int i = 0; i < m; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    const auto diffs = angle_differences(phi);
    double max_diff = 0.0;
    for (double d : diffs) max_diff = std::max(max_diff, std::abs(d));
    CHECK(std::abs(sum(s.theta)) <= 1e-9 * m * max_diff);
  }
}

TEST_CASE("reversing Phi reverses Theta") {
  CounterRng rng(12);
  for (int k = 0; k < 100; ++k) {
    const int m = 3 + static_cast<int>(rng.uniform() * 40);
    std::vector<double> rhs(m);
    for (auto& v : rhs) v = rng.uniform() - 0.5;
    std::vector<double> rev(rhs.rbegin(), rhs.rend());
    const auto a = solve_regularized(rhs, 1e3);
    const auto b = solve_regularized(rev, 1e3);
    for (int i = 0; i < m; ++i) CHECK(std::abs(a.theta[i] - b.theta[m - 1 - i]) <= 1e-12 * (1.0 + std::abs(a.theta[i])));
  }
}

TEST_CASE("strip smoothing") {
  const int m = 16;
  const std::vector<double> flat(m, -kTwoPi / m), zero(m, 0.0);
  SUBCASE("flat plane gives zero rotation") {
    auto theta = zero;
    for (int j = 0; j < 10; ++j) {
      theta = strip_smoothing_solve(flat, flat, theta, 1e3).theta;
      for (double t : theta) CHECK(t == 0.0);
    }
  }
  SUBCASE("first step agrees with the wedge solve") {
    CounterRng rng(14);
    const auto phi = random_phi(rng, m, 0.3);
    const auto strip = strip_smoothing_solve(phi, flat, zero, 1e3);
    const auto wedge = wedge_smoothing_solve(phi, 1e3);
    for (int i = 0; i < m; ++i) CHECK(strip.theta[i] == doctest::Approx(wedge.theta[i]).epsilon(1e-14));
  }
  SUBCASE("length mismatch") { CHECK_THROWS_AS(strip_smoothing_solve(flat, {0.1, 0.2, 0.3}, zero, 1e3), Error); }
}

TEST_CASE("strip scheme grows on the dented sphere while the wedge scheme stays bounded") {
  auto dented = build_csg_field(CsgNode::intersection_of(
      {CsgNode::leaf(SpherePrim{}),
       CsgNode::complement(CsgNode::leaf(SpherePrim{Vec3(0.08, 0, 1.02), 0.03}))}));
  const SurfaceView view(*dented);
  auto max_abs = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  TraceParams params;
  params.m = 50;
  params.n = 20;
  params.h = 0.01;
  params.scheme = SmoothingScheme::Wedge;
  const auto wedge = radial_trace(view, Vec3(0, 0, 1), params);
  params.scheme = SmoothingScheme::Strip;
  const auto strip = radial_trace(view, Vec3(0, 0, 1), params);
  REQUIRE(wedge.theta.size() == 21);
  REQUIRE(strip.theta.size() == 21);
  CHECK(max_abs(strip.theta[20]) > max_abs(wedge.theta[20]));
}
