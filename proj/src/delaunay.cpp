#include "geoexp/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace geoexp {
namespace {

using Rational = boost::multiprecision::cpp_rational;

// Error-bound coefficients of the first-stage filters (Shewchuk 1997).
constexpr double kEps = 0x1p-53;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;

double sign_of(const Rational& r) { return r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0); }

} // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double l = (a.x() - c.x()) * (b.y() - c.y());
  const double r = (a.y() - c.y()) * (b.x() - c.x());
  const double det = l - r;
  if (std::abs(det) > kOrientBound * (std::abs(l) + std::abs(r))) return det;
  const Rational ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  return sign_of((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > kInCircleBound * permanent) return det;

  const Rational dx(d.x()), dy(d.y());
  const Rational ax = Rational(a.x()) - dx, ay = Rational(a.y()) - dy;
  const Rational bx = Rational(b.x()) - dx, by = Rational(b.y()) - dy;
  const Rational cx = Rational(c.x()) - dx, cy = Rational(c.y()) - dy;
  const Rational e = (ax * ax + ay * ay) * (bx * cy - cx * by) + (bx * bx + by * by) * (cx * ay - ax * cy) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  return sign_of(e);
}

namespace {

struct DTri {
  std::array<int, 3> v;
  std::array<int, 3> nbr;  // nbr[k] is across the edge opposite v[k]
  bool alive = true;
};

// Hilbert index of (x, y) on a 2^16 grid.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << 15; s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

class Triangulator {
public:
  explicit Triangulator(const std::vector<Vec2>& input) : pts_(input) {}

  std::vector<Tri> run() {
    const int n = static_cast<int>(pts_.size());
    Eigen::AlignedBox2d box;
    for (const auto& p : pts_) box.extend(p);
    const Vec2 center = box.center();
    const double span = std::max(box.sizes().maxCoeff(), 1e-300);

    // Super triangle far outside the data.
    const double big = 1e4 * span;
    pts_.push_back(center + Vec2(-big, -big));
    pts_.push_back(center + Vec2(big, -big));
    pts_.push_back(center + Vec2(0.0, big));
    tris_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> key(n);
    for (int i = 0; i < n; ++i) {
      const Vec2 q = (pts_[i] - box.min()) / span * 65535.0;
      key[i] = hilbert_index(static_cast<std::uint32_t>(std::clamp(q.x(), 0.0, 65535.0)),
                             static_cast<std::uint32_t>(std::clamp(q.y(), 0.0, 65535.0)));
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });

    for (int idx : order) insert(idx);

    std::vector<Tri> out;
    for (const auto& t : tris_) {
      if (!t.alive || t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    if (out.empty()) throw Error(ErrorCode::TriangulationFailure, "point set is degenerate");
    return out;
  }

private:
  int locate(const Vec2& p) {
    int t = last_;
    if (t < 0 || !tris_[t].alive) t = last_alive();
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const DTri& tri = tris_[t];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const Vec2& a = pts_[tri.v[(k + 1) % 3]];
        const Vec2& b = pts_[tri.v[(k + 2) % 3]];
        if (orient2d(a, b, p) < 0.0) {
          next = tri.nbr[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // The visibility walk is guaranteed to terminate on a Delaunay mesh; keep a
    // brute-force fallback anyway.
    for (int k = 0; k < static_cast<int>(tris_.size()); ++k) {
      const DTri& tri = tris_[k];
      if (!tri.alive) continue;
      if (orient2d(pts_[tri.v[0]], pts_[tri.v[1]], p) >= 0 && orient2d(pts_[tri.v[1]], pts_[tri.v[2]], p) >= 0 &&
          orient2d(pts_[tri.v[2]], pts_[tri.v[0]], p) >= 0)
        return k;
    }
    throw Error(ErrorCode::TriangulationFailure, "point location failed");
  }

  int last_alive() const {
    for (int k = static_cast<int>(tris_.size()) - 1; k >= 0; --k)
      if (tris_[k].alive) return k;
    return 0;
  }

  bool in_circumcircle(int t, const Vec2& p) const {
    const DTri& tri = tris_[t];
    return incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0.0;
  }

  void insert(int idx) {
    const Vec2 p = pts_[idx];
    const int start = locate(p);
    for (int v : tris_[start].v)
      if (pts_[v] == p) return;  // duplicate

    cavity_.clear();
    cavity_.push_back(start);
    mark_.resize(tris_.size(), 0);
    mark_[start] = 1;
    for (std::size_t c = 0; c < cavity_.size(); ++c) {
      const DTri& tri = tris_[cavity_[c]];
      for (int k = 0; k < 3; ++k) {
        const int nb = tri.nbr[k];
        if (nb < 0 || mark_[nb]) continue;
        if (in_circumcircle(nb, p)) {
          mark_[nb] = 1;
          cavity_.push_back(nb);
        }
      }
    }

    edges_.clear();
    for (int t : cavity_) {
      const DTri& tri = tris_[t];
      for (int k = 0; k < 3; ++k) {
        const int nb = tri.nbr[k];
        if (nb >= 0 && mark_[nb]) continue;
        edges_.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], nb});
      }
    }
    for (int t : cavity_) {
      tris_[t].alive = false;
      mark_[t] = 0;
    }

    const int first = static_cast<int>(tris_.size());
    for (const auto& e : edges_) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{e.a, e.b, idx}, {-1, -1, e.outside}, true});
      if (e.outside >= 0) {
        DTri& o = tris_[e.outside];
        for (int k = 0; k < 3; ++k) {
          const int a = o.v[(k + 1) % 3], b = o.v[(k + 2) % 3];
          if (a == e.b && b == e.a) o.nbr[k] = id;
        }
      }
    }
    // Fan links: new triangle (a, b, p) meets (b, c, p) across (b, p) and
    // (z, a, p) across (p, a).
    const int count = static_cast<int>(tris_.size()) - first;
    for (int x = 0; x < count; ++x) {
      DTri& t = tris_[first + x];
      for (int y = 0; y < count; ++y) {
        if (x == y) continue;
        const DTri& u = tris_[first + y];
        if (u.v[0] == t.v[1]) t.nbr[0] = first + y;
        if (u.v[1] == t.v[0]) t.nbr[1] = first + y;
      }
    }
    mark_.resize(tris_.size(), 0);
    last_ = first;
  }

  std::vector<Vec2> pts_;
  std::vector<DTri> tris_;
  std::vector<int> cavity_;
  std::vector<char> mark_;
  struct EdgeRec {
    int a, b, outside;
  };
  std::vector<EdgeRec> edges_;
  int last_ = 0;
};

} // namespace

std::vector<Tri> delaunay_triangulate(const std::vector<Vec2>& points) {
  if (points.size() < 3) throw Error(ErrorCode::TriangulationFailure, "need at least 3 points");
  for (const auto& p : points)
    if (!p.allFinite()) throw Error(ErrorCode::TriangulationFailure, "non-finite point");
  return Triangulator(points).run();
}

} // namespace geoexp
