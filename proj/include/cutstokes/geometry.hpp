/// @file geometry.hpp
/// Level-set domains, interface linearization, clipping, and quadrature.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutstokes {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
  /// Rotation by -pi/2 (clockwise): (x,y) -> (y,-x).
  Vec2 rot_cw() const { return {y, -x}; }
  /// Rotation by +pi/2 (counter-clockwise): (x,y) -> (-y,x).
  Vec2 rot_ccw() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCutError : GeometryError {
  using GeometryError::GeometryError;
};
struct UnsupportedDegreeError : GeometryError {
  using GeometryError::GeometryError;
};

/// Signed level-set description of the physical domain: inside = {phi < 0}.
struct LevelSetDomain {
  std::string name;
  std::function<double(Vec2)> phi;
  /// Bounding box {xmin, ymin, xmax, ymax} of the background domain.
  std::array<double, 4> bbox{0.0, 0.0, 1.0, 1.0};

  double operator()(Vec2 p) const { return phi(p); }

  static LevelSetDomain disk(Vec2 center, double radius,
                             std::array<double, 4> box);
  /// phi = x - offset (axis = 0) or y - offset (axis = 1); inside below/left.
  static LevelSetDomain halfplane(int axis, double offset,
                                  std::array<double, 4> box);
  /// L-shaped channel: inside iff x < xc or y > yc (within the box);
  /// phi = min(x - xc, yc - y).
  static LevelSetDomain lshape(double xc, double yc, std::array<double, 4> box);
  /// Entire box inside (phi = -1): fitted/no-cut setups.
  static LevelSetDomain all_inside(std::array<double, 4> box);
};

/// Simple planar polygon (counter-clockwise).
struct Polygon {
  std::vector<Vec2> pts;

  bool empty() const { return pts.size() < 3; }
  double area() const;
  Vec2 centroid() const;
};

/// Quadrature rule in physical coordinates; weights carry the measure.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// Gauss-Legendre nodes/weights on [0,1]; exact for polynomials of degree
/// 2n-1.  Computed by Newton iteration on the Legendre recurrence.
void gauss_legendre_01(int n, std::vector<double>& nodes,
                       std::vector<double>& weights);

/// Rule on the segment [a,b] exact for (traces of) polynomials of `degree`.
QuadratureRule segment_quadrature(Vec2 a, Vec2 b, int degree);

/// Rule on the triangle (p0,p1,p2) exact to `degree` (collapsed tensor rule).
QuadratureRule triangle_quadrature(Vec2 p0, Vec2 p1, Vec2 p2, int degree);

/// Rule on a convex polygon: centroid fan of triangle rules.
QuadratureRule polygon_quadrature(const Polygon& poly, int degree);

/// Result of cutting one triangle against the zero level set.
struct CutRegion {
  enum class Kind { Inside, Outside, Cut } kind = Kind::Outside;
  /// Part of the triangle inside the domain (full triangle when Inside).
  Polygon inside;
  /// Linearized interface segment (Cut only), endpoints on the triangle edges.
  Vec2 seg_a{}, seg_b{};
  /// Unit normal of the segment pointing out of the domain (Cut only).
  Vec2 normal{};

  bool is_cut() const { return kind == Kind::Cut; }
  double inside_area() const { return inside.area(); }
};

/// Classify and clip a CCW triangle against phi.  Vertex values with
/// |phi| < 1e-12 h are snapped onto the interface; segment endpoints are
/// refined by bisection of phi along the cut edges.
CutRegion cut_triangle(const std::array<Vec2, 3>& tri,
                       const std::function<double(Vec2)>& phi);

/// Same, with precomputed vertex values and an explicit snap tolerance, so a
/// caller holding a per-vertex cache classifies every triangle consistently.
CutRegion cut_triangle(const std::array<Vec2, 3>& tri,
                       const std::function<double(Vec2)>& phi,
                       const std::array<double, 3>& phi_vertices,
                       double snap_tol);

/// Interface segment of a cut triangle (nullopt when uncut).
std::optional<std::pair<Vec2, Vec2>> linearize_interface(
    const std::array<Vec2, 3>& tri, const std::function<double(Vec2)>& phi);

/// Inside part of a triangle (empty polygon when fully outside).
Polygon clip_inside(const std::array<Vec2, 3>& tri,
                    const std::function<double(Vec2)>& phi);

/// Root of phi along the segment [a,b]; requires a sign change.
double bisect_edge_root(Vec2 a, Vec2 b, const std::function<double(Vec2)>& phi);

}  // namespace cutstokes
