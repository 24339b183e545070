/// @file geometry.cpp

#include "cutstokes/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace cutstokes {

namespace {
constexpr int kMaxDegree = 30;
constexpr double kSnapFactor = 1e-12;

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw UnsupportedDegreeError("quadrature degree " +
                                 std::to_string(degree) +
                                 " outside supported range [0, 30]");
}
}  // namespace

// ---------------------------------------------------------------------------
// Level-set factories
// ---------------------------------------------------------------------------

LevelSetDomain LevelSetDomain::disk(Vec2 center, double radius,
                                    std::array<double, 4> box) {
  return {"disk",
          [center, radius](Vec2 p) { return (p - center).norm() - radius; },
          box};
}

LevelSetDomain LevelSetDomain::halfplane(int axis, double offset,
                                         std::array<double, 4> box) {
  if (axis == 0)
    return {"halfplane-x", [offset](Vec2 p) { return p.x - offset; }, box};
  return {"halfplane-y", [offset](Vec2 p) { return p.y - offset; }, box};
}

LevelSetDomain LevelSetDomain::lshape(double xc, double yc,
                                      std::array<double, 4> box) {
  return {"lshape",
          [xc, yc](Vec2 p) { return std::min(p.x - xc, yc - p.y); }, box};
}

LevelSetDomain LevelSetDomain::all_inside(std::array<double, 4> box) {
  return {"all-inside", [](Vec2) { return -1.0; }, box};
}

// ---------------------------------------------------------------------------
// Polygons
// ---------------------------------------------------------------------------

double Polygon::area() const {
  if (pts.size() < 3) return 0.0;
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % pts.size()];
    a += p.cross(q);
  }
  return 0.5 * a;
}

Vec2 Polygon::centroid() const {
  // Area-weighted centroid; falls back to the vertex mean for slivers.
  double a = 0.0;
  Vec2 c{0, 0};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % pts.size()];
    const double w = p.cross(q);
    a += w;
    c += (p + q) * w;
  }
  if (std::abs(a) > 1e-300) return c / (3.0 * a);
  Vec2 m{0, 0};
  for (const Vec2& p : pts) m += p;
  return m / static_cast<double>(pts.size());
}

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre
// ---------------------------------------------------------------------------

void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Initial guess (Chebyshev), then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = 0.5 * (1.0 - x);  // descending x -> ascending node
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  std::sort(nodes.begin(), nodes.end());
}

QuadratureRule segment_quadrature(Vec2 a, Vec2 b, int degree) {
  check_degree(degree);
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<double> x, w;
  gauss_legendre_01(n, x, w);
  const double len = (b - a).norm();
  QuadratureRule rule;
  rule.points.reserve(n);
  rule.weights.reserve(n);
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(a + (b - a) * x[i]);
    rule.weights.push_back(w[i] * len);
  }
  return rule;
}

QuadratureRule triangle_quadrature(Vec2 p0, Vec2 p1, Vec2 p2, int degree) {
  check_degree(degree);
  // Collapsed tensor rule: (u, v) in [0,1]^2 -> (u, v(1-u)) on the reference
  // triangle with Jacobian (1-u).  The extra factor raises the u-degree by 1.
  const int nu = std::max(1, (degree + 3) / 2);
  const int nv = std::max(1, (degree + 2) / 2);
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre_01(nu, xu, wu);
  gauss_legendre_01(nv, xv, wv);
  const double jac = (p1 - p0).cross(p2 - p0);  // signed, 2*area
  QuadratureRule rule;
  rule.points.reserve(nu * nv);
  rule.weights.reserve(nu * nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = xu[i];
      const double v = xv[j] * (1.0 - u);
      rule.points.push_back(p0 + (p1 - p0) * u + (p2 - p0) * v);
      rule.weights.push_back(wu[i] * wv[j] * (1.0 - u) * std::abs(jac));
    }
  return rule;
}

QuadratureRule polygon_quadrature(const Polygon& poly, int degree) {
  check_degree(degree);
  QuadratureRule rule;
  if (poly.pts.size() < 3) return rule;
  if (poly.pts.size() == 3)
    return triangle_quadrature(poly.pts[0], poly.pts[1], poly.pts[2], degree);
  const Vec2 c = poly.centroid();
  for (std::size_t i = 0; i < poly.pts.size(); ++i) {
    const Vec2& p = poly.pts[i];
    const Vec2& q = poly.pts[(i + 1) % poly.pts.size()];
    if (std::abs((p - c).cross(q - c)) < 1e-300) continue;
    const auto sub = triangle_quadrature(c, p, q, degree);
    rule.points.insert(rule.points.end(), sub.points.begin(),
                       sub.points.end());
    rule.weights.insert(rule.weights.end(), sub.weights.begin(),
                        sub.weights.end());
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Cutting
// ---------------------------------------------------------------------------

double bisect_edge_root(Vec2 a, Vec2 b,
                        const std::function<double(Vec2)>& phi) {
  double fa = phi(a), fb = phi(b);
  if (fa == 0.0) return 0.0;
  if (fb == 0.0) return 1.0;
  if ((fa > 0.0) == (fb > 0.0))
    throw DegenerateCutError("bisect_edge_root: no sign change along edge");
  double lo = 0.0, hi = 1.0;
  // Linear initial split, then plain bisection to ~1e-16 relative.
  for (int it = 0; it < 64; ++it) {
    const double mid = (it == 0) ? fa / (fa - fb) : 0.5 * (lo + hi);
    const double fm = phi(a + (b - a) * mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0))
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16) break;
  }
  return 0.5 * (lo + hi);
}

CutRegion cut_triangle(const std::array<Vec2, 3>& tri,
                       const std::function<double(Vec2)>& phi) {
  const double h = std::max({(tri[1] - tri[0]).norm(),
                             (tri[2] - tri[1]).norm(),
                             (tri[0] - tri[2]).norm()});
  return cut_triangle(tri, phi, {phi(tri[0]), phi(tri[1]), phi(tri[2])},
                      kSnapFactor * h);
}

CutRegion cut_triangle(const std::array<Vec2, 3>& tri,
                       const std::function<double(Vec2)>& phi,
                       const std::array<double, 3>& phi_vertices,
                       double snap) {
  const double h = std::max({(tri[1] - tri[0]).norm(),
                             (tri[2] - tri[1]).norm(),
                             (tri[0] - tri[2]).norm()});
  const std::array<double, 3>& f = phi_vertices;
  std::array<int, 3> sign{};
  int npos = 0, nneg = 0;
  for (int i = 0; i < 3; ++i) {
    sign[i] = (f[i] > snap) ? 1 : (f[i] < -snap ? -1 : 0);
    npos += sign[i] > 0;
    nneg += sign[i] < 0;
  }

  CutRegion out;
  if (npos == 0) {
    out.kind = CutRegion::Kind::Inside;
    out.inside.pts = {tri[0], tri[1], tri[2]};
    return out;
  }
  if (nneg == 0) {
    out.kind = CutRegion::Kind::Outside;
    return out;
  }

  // Mixed strict signs: collect inside vertices and edge crossings in CCW
  // order; an exactly-zero vertex doubles as a segment endpoint.
  out.kind = CutRegion::Kind::Cut;
  std::vector<Vec2> crossings;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (sign[i] <= 0) out.inside.pts.push_back(tri[i]);
    if (sign[i] == 0 && (npos + nneg) == 2) crossings.push_back(tri[i]);
    if (sign[i] * sign[j] < 0) {
      const double t = bisect_edge_root(tri[i], tri[j], phi);
      const Vec2 r = tri[i] + (tri[j] - tri[i]) * t;
      out.inside.pts.push_back(r);
      crossings.push_back(r);
    }
  }
  if (crossings.size() != 2)
    throw DegenerateCutError("cut_triangle: interface does not cross the "
                             "triangle boundary exactly twice");

  // Deduplicate inside-polygon vertices (a zero vertex may repeat).
  auto& pts = out.inside.pts;
  for (std::size_t i = 0; i < pts.size();) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % pts.size()];
    if ((p - q).norm() < 1e-14 * h && pts.size() > 1)
      pts.erase(pts.begin() + static_cast<long>((i + 1) % pts.size()));
    else
      ++i;
  }

  out.seg_a = crossings[0];
  out.seg_b = crossings[1];
  const Vec2 mid = (out.seg_a + out.seg_b) * 0.5;
  Vec2 n = (out.seg_b - out.seg_a).rot_cw();
  const double nn = n.norm();
  if (nn < 1e-300)
    throw DegenerateCutError("cut_triangle: zero-length interface segment");
  n = n / nn;
  // Orient the normal away from the inside region.
  if (n.dot(mid - out.inside.centroid()) < 0.0) n = n * -1.0;
  out.normal = n;
  return out;
}

std::optional<std::pair<Vec2, Vec2>> linearize_interface(
    const std::array<Vec2, 3>& tri, const std::function<double(Vec2)>& phi) {
  const CutRegion cut = cut_triangle(tri, phi);
  if (!cut.is_cut()) return std::nullopt;
  return std::make_pair(cut.seg_a, cut.seg_b);
}

Polygon clip_inside(const std::array<Vec2, 3>& tri,
                    const std::function<double(Vec2)>& phi) {
  return cut_triangle(tri, phi).inside;
}

}  // namespace cutstokes
