#pragma once
/// @file spaces.hpp
/// Finite element spaces on active meshes: continuous Lagrange P1/P2,
/// H(div)-conforming RT0/RT1/BDM1, and discontinuous DG0/DG1 (optionally
/// supported only on the cut band).
///
/// Basis functions are constructed directly on each physical element by
/// inverting the functional/monomial Vandermonde matrix in centroid-centered,
/// diameter-scaled coordinates.  Degree-of-freedom functionals are defined
/// with *global* edge frames (tangent from the lower to the higher vertex id,
/// normal = tangent rotated by -pi/2), so shared functionals are literally
/// identical from both sides of an edge and no orientation signs appear in
/// the dof map.  Conformity (continuous normal traces, C0 Lagrange) follows.

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cutstokes/mesh.hpp"

namespace cutstokes {

struct UnsupportedSpaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// 2x2 matrix, row-major; used for velocity gradients.
struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
  double frobenius2() const {
    return a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
  }
};

/// Quadratic polynomial in centered, scaled coordinates:
///   p(x) = sum c_m * m(xi, eta),  m in {1, xi, eta, xi^2, xi*eta, eta^2},
/// with xi = (x - origin.x)/scale, eta = (y - origin.y)/scale.  Storing the
/// coefficients makes directional derivatives of any order and the canonical
/// polynomial extension off the element exact.
struct Poly2 {
  std::array<double, 6> c{};
  Vec2 origin{0, 0};
  double scale = 1.0;

  double value(Vec2 p) const {
    const double xi = (p.x - origin.x) / scale;
    const double eta = (p.y - origin.y) / scale;
    return c[0] + c[1] * xi + c[2] * eta + c[3] * xi * xi + c[4] * xi * eta +
           c[5] * eta * eta;
  }
  Vec2 gradient(Vec2 p) const {
    const double xi = (p.x - origin.x) / scale;
    const double eta = (p.y - origin.y) / scale;
    return Vec2{c[1] + 2 * c[3] * xi + c[4] * eta,
                c[2] + c[4] * xi + 2 * c[5] * eta} /
           scale;
  }
  /// j-th directional derivative along the unit vector n (exact; 0 for j>2).
  double dderiv(Vec2 p, Vec2 n, int j) const {
    if (j == 0) return value(p);
    if (j == 1) return gradient(p).dot(n);
    if (j == 2)
      return (2 * c[3] * n.x * n.x + 2 * c[4] * n.x * n.y +
              2 * c[5] * n.y * n.y) /
             (scale * scale);
    return 0.0;
  }
};

enum class Family { Lagrange, RaviartThomas, BrezziDouglasMarini, Discontinuous };
enum class Support { Active, CutBand };

/// Local element description: the list of degree-of-freedom functionals, in
/// the fixed local order used by every element of a space.
struct ReferenceElement {
  enum class DofKind {
    VertexPoint,    ///< value at local vertex `entity`
    EdgeMidpoint,   ///< value at midpoint of local edge `entity`
    CellVertex,     ///< discontinuous value at local vertex `entity`
    CellCentroid,   ///< discontinuous value at the centroid
    EdgeMomentP0,   ///< ∫_e (v·n) ds on local edge `entity`
    EdgeMomentP1,   ///< ∫_e (v·n) (2s/L - 1) ds, s from the edge start
    InteriorMomentX,  ///< ∫_T v·(1,0) dx
    InteriorMomentY,  ///< ∫_T v·(0,1) dx
  };
  struct LocalDof {
    DofKind kind;
    int entity = 0;
  };

  Family family;
  int degree = 0;
  bool vector_valued = false;
  std::vector<LocalDof> dofs;
  int ndofs() const { return static_cast<int>(dofs.size()); }
};

/// Build the reference description; throws UnsupportedSpaceError outside
/// {P1, P2, RT0, RT1, BDM1, DG0, DG1}.
ReferenceElement reference_element(Family family, int degree);

/// Exact partial derivative (axis 0 = ∂/∂x, 1 = ∂/∂y), in the same frame.
Poly2 poly_partial(const Poly2& p, int axis);

/// One basis function on a physical element; `y` is unused for scalars.
struct BasisFn {
  Poly2 x, y;
  Vec2 vec(Vec2 p) const { return {x.value(p), y.value(p)}; }
  double div(Vec2 p) const { return x.gradient(p).x + y.gradient(p).y; }
  double rot(Vec2 p) const { return y.gradient(p).x - x.gradient(p).y; }
  /// Scalar curl (for Lagrange bases): crl w = (-∂y w, ∂x w).
  Vec2 curl(Vec2 p) const {
    const Vec2 g = x.gradient(p);
    return {-g.y, g.x};
  }
  Mat2 grad(Vec2 p) const {
    const Vec2 gx = x.gradient(p), gy = y.gradient(p);
    return {gx.x, gx.y, gy.x, gy.y};
  }
};

/// Basis dual to the reference functionals on one physical triangle.
/// `edge_forward[k]` states whether the moment parameterization of local
/// edge k = (v_k, v_{k+1 mod 3}) runs from v_k to v_{k+1} (the global rule:
/// from the lower to the higher vertex id).  The default treats local
/// indices as ids.
std::vector<BasisFn> element_basis(const ReferenceElement& re,
                                   const std::array<Vec2, 3>& tri);
std::vector<BasisFn> element_basis(const ReferenceElement& re,
                                   const std::array<Vec2, 3>& tri,
                                   const std::array<bool, 3>& edge_forward);

/// Apply local dof functional i to an analytic field (scalar or vector; the
/// unused component of the pair is ignored for scalar families).
double apply_local_dof(const ReferenceElement& re,
                       const std::array<Vec2, 3>& tri,
                       const std::array<bool, 3>& edge_forward, int i,
                       const std::function<double(Vec2)>& fs,
                       const std::function<Vec2(Vec2)>& fv);

/// A finite element space over the supported elements of an active mesh.
struct FeSpace {
  const ActiveMesh* am = nullptr;
  ReferenceElement ref;
  Support support = Support::Active;
  int ndofs = 0;

  /// Descriptor of each global dof: what functional it is, on which mesh
  /// entity (vertex / edge / element id), and which moment index.
  struct DofInfo {
    enum class Kind { VertexPoint, EdgeMidpoint, EdgeMoment, InteriorMoment, CellPoint };
    Kind kind;
    int entity = 0;  ///< vertex, edge, or element id
    int index = 0;   ///< moment number on the entity (0-based)
  };
  std::vector<DofInfo> dof_info;

  std::vector<char> elem_supported;           ///< per background element
  std::vector<std::vector<int>> elem_dofs;    ///< local -> global, per element
  std::vector<std::vector<BasisFn>> basis;    ///< per element, per local dof

  /// First global dof and count on an edge (H(div) and P2 edge dofs);
  /// {-1, 0} when the edge carries none.
  std::array<int, 2> edge_dof_range(int edge) const {
    return {edge_dof_start[edge], edge_dof_start[edge] >= 0 ? dofs_per_edge : 0};
  }
  std::vector<int> edge_dof_start;
  int dofs_per_edge = 0;

  bool vector_valued() const { return ref.vector_valued; }
  int local_dof_count() const { return ref.ndofs(); }
};

/// Build a space on the supported elements of `am`.
FeSpace build_space(const ActiveMesh& am, Family family, int degree,
                    Support support = Support::Active);

/// Pressure partner degree: RT_k -> k, BDM_k -> k-1.
int pressure_partner_degree(Family family, int degree);

/// Apply the dof functionals of the space to an analytic field.
std::vector<double> interpolate(const FeSpace& V,
                                const std::function<double(Vec2)>& f);
std::vector<double> interpolate(const FeSpace& V,
                                const std::function<Vec2(Vec2)>& f);

/// Single dof functional applied to an analytic field (used for strong
/// boundary constraints on fitted facets).
double dof_value(const FeSpace& V, int dof, const std::function<double(Vec2)>& f);
double dof_value(const FeSpace& V, int dof, const std::function<Vec2(Vec2)>& f);

/// Pointwise evaluation of a coefficient vector on one element.
double eval_scalar(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);
Vec2 eval_grad_scalar(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);
Vec2 eval_vector(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);
Mat2 eval_grad_vector(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);
double eval_div(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);
double eval_rot(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);
Vec2 eval_curl_scalar(const FeSpace& V, const std::vector<double>& u, int elem, Vec2 p);

}  // namespace cutstokes
