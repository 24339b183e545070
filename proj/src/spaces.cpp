#include "cutstokes/spaces.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace cutstokes {

namespace {

/// Quadrature degree for dof functionals.  Exactness for the Vandermonde
/// fields only needs degree 3; boundary data and analytic interpolation
/// targets get a little headroom.
constexpr int kMomentDegree = 9;

[[noreturn]] void unsupported(Family family, int degree) {
  const char* name = family == Family::Lagrange          ? "Lagrange"
                     : family == Family::RaviartThomas   ? "Raviart-Thomas"
                     : family == Family::BrezziDouglasMarini
                         ? "Brezzi-Douglas-Marini"
                         : "Discontinuous";
  throw UnsupportedSpaceError(std::string(name) + " degree " +
                              std::to_string(degree) + " is not implemented");
}

Vec2 tri_centroid(const std::array<Vec2, 3>& tri) {
  return (tri[0] + tri[1] + tri[2]) / 3.0;
}

double tri_diameter(const std::array<Vec2, 3>& tri) {
  return std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(),
                   (tri[0] - tri[2]).norm()});
}

/// Monomial fields spanning the element space, in the centered/scaled frame.
/// Any basis of the span works; the Vandermonde inversion does the rest.
std::vector<BasisFn> monomial_fields(const ReferenceElement& re, Vec2 origin,
                                     double scale) {
  const auto scalar = [&](int m) {
    BasisFn f;
    f.x.origin = f.y.origin = origin;
    f.x.scale = f.y.scale = scale;
    f.x.c[m] = 1.0;
    return f;
  };
  const auto vec = [&](int mx, int my) {
    // Component monomial indices into {1, xi, eta, xi^2, xi*eta, eta^2};
    // -1 leaves the component zero.
    BasisFn f;
    f.x.origin = f.y.origin = origin;
    f.x.scale = f.y.scale = scale;
    if (mx >= 0) f.x.c[mx] = 1.0;
    if (my >= 0) f.y.c[my] = 1.0;
    return f;
  };

  std::vector<BasisFn> fields;
  if (!re.vector_valued) {
    const int nm = re.degree == 0 ? 1 : re.degree == 1 ? 3 : 6;
    for (int m = 0; m < nm; ++m) fields.push_back(scalar(m));
    return fields;
  }
  if (re.family == Family::RaviartThomas && re.degree == 0) {
    fields.push_back(vec(0, -1));  // (1, 0)
    fields.push_back(vec(-1, 0));  // (0, 1)
    fields.push_back(vec(1, 2));   // (xi, eta)
    return fields;
  }
  // BDM1 and RT1 share the full P1^2 block.
  for (int m = 0; m < 3; ++m) fields.push_back(vec(m, -1));
  for (int m = 0; m < 3; ++m) fields.push_back(vec(-1, m));
  if (re.family == Family::RaviartThomas) {
    fields.push_back(vec(3, 4));  // (xi^2,   xi*eta)
    fields.push_back(vec(4, 5));  // (xi*eta, eta^2)
  }
  return fields;
}

struct EdgeFrame {
  Vec2 start, end, tangent, normal;
  double length = 0;
};

EdgeFrame edge_frame(const std::array<Vec2, 3>& tri,
                     const std::array<bool, 3>& edge_forward, int k) {
  EdgeFrame f;
  const Vec2 a = tri[k], b = tri[(k + 1) % 3];
  f.start = edge_forward[k] ? a : b;
  f.end = edge_forward[k] ? b : a;
  f.length = (f.end - f.start).norm();
  f.tangent = (f.end - f.start) / f.length;
  f.normal = f.tangent.rot_cw();
  return f;
}

}  // namespace

ReferenceElement reference_element(Family family, int degree) {
  using K = ReferenceElement::DofKind;
  ReferenceElement re;
  re.family = family;
  re.degree = degree;

  switch (family) {
    case Family::Lagrange:
      if (degree < 1 || degree > 2) unsupported(family, degree);
      for (int v = 0; v < 3; ++v) re.dofs.push_back({K::VertexPoint, v});
      if (degree == 2)
        for (int e = 0; e < 3; ++e) re.dofs.push_back({K::EdgeMidpoint, e});
      return re;

    case Family::Discontinuous:
      if (degree < 0 || degree > 1) unsupported(family, degree);
      if (degree == 0) {
        re.dofs.push_back({K::CellCentroid, 0});
      } else {
        for (int v = 0; v < 3; ++v) re.dofs.push_back({K::CellVertex, v});
      }
      return re;

    case Family::RaviartThomas:
      if (degree < 0 || degree > 1) unsupported(family, degree);
      re.vector_valued = true;
      for (int e = 0; e < 3; ++e) {
        re.dofs.push_back({K::EdgeMomentP0, e});
        if (degree == 1) re.dofs.push_back({K::EdgeMomentP1, e});
      }
      if (degree == 1) {
        re.dofs.push_back({K::InteriorMomentX, 0});
        re.dofs.push_back({K::InteriorMomentY, 0});
      }
      return re;

    case Family::BrezziDouglasMarini:
      if (degree != 1) unsupported(family, degree);
      re.vector_valued = true;
      for (int e = 0; e < 3; ++e) {
        re.dofs.push_back({K::EdgeMomentP0, e});
        re.dofs.push_back({K::EdgeMomentP1, e});
      }
      return re;
  }
  unsupported(family, degree);
}

Poly2 poly_partial(const Poly2& p, int axis) {
  Poly2 d;
  d.origin = p.origin;
  d.scale = p.scale;
  if (axis == 0) {
    d.c[0] = p.c[1] / p.scale;
    d.c[1] = 2 * p.c[3] / p.scale;
    d.c[2] = p.c[4] / p.scale;
  } else {
    d.c[0] = p.c[2] / p.scale;
    d.c[1] = p.c[4] / p.scale;
    d.c[2] = 2 * p.c[5] / p.scale;
  }
  return d;
}

int pressure_partner_degree(Family family, int degree) {
  if (family == Family::RaviartThomas) return degree;
  if (family == Family::BrezziDouglasMarini) return degree - 1;
  throw UnsupportedSpaceError("pressure partner is defined for H(div) families");
}

double apply_local_dof(const ReferenceElement& re,
                       const std::array<Vec2, 3>& tri,
                       const std::array<bool, 3>& edge_forward, int i,
                       const std::function<double(Vec2)>& fs,
                       const std::function<Vec2(Vec2)>& fv) {
  using K = ReferenceElement::DofKind;
  const auto& dof = re.dofs.at(i);
  switch (dof.kind) {
    case K::VertexPoint:
    case K::CellVertex:
      return fs(tri[dof.entity]);
    case K::EdgeMidpoint:
      return fs((tri[dof.entity] + tri[(dof.entity + 1) % 3]) * 0.5);
    case K::CellCentroid:
      return fs(tri_centroid(tri));
    case K::EdgeMomentP0:
    case K::EdgeMomentP1: {
      const auto f = edge_frame(tri, edge_forward, dof.entity);
      const auto rule = segment_quadrature(f.start, f.end, kMomentDegree);
      double m = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        double w = rule.weights[q];
        if (dof.kind == K::EdgeMomentP1)
          w *= 2 * (rule.points[q] - f.start).dot(f.tangent) / f.length - 1;
        m += w * fv(rule.points[q]).dot(f.normal);
      }
      return m;
    }
    case K::InteriorMomentX:
    case K::InteriorMomentY: {
      const auto rule = triangle_quadrature(tri[0], tri[1], tri[2], kMomentDegree);
      double m = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 v = fv(rule.points[q]);
        m += rule.weights[q] * (dof.kind == K::InteriorMomentX ? v.x : v.y);
      }
      return m;
    }
  }
  throw UnsupportedSpaceError("unknown dof kind");
}

std::vector<BasisFn> element_basis(const ReferenceElement& re,
                                   const std::array<Vec2, 3>& tri,
                                   const std::array<bool, 3>& edge_forward) {
  const int n = re.ndofs();
  const auto fields =
      monomial_fields(re, tri_centroid(tri), tri_diameter(tri));

  Eigen::MatrixXd V(n, n);
  for (int j = 0; j < n; ++j) {
    const auto& f = fields[j];
    for (int i = 0; i < n; ++i)
      V(i, j) = apply_local_dof(
          re, tri, edge_forward, i, [&](Vec2 p) { return f.x.value(p); },
          [&](Vec2 p) { return f.vec(p); });
  }
  const Eigen::MatrixXd C = Eigen::FullPivLU<Eigen::MatrixXd>(V).inverse();

  std::vector<BasisFn> basis(n);
  for (int k = 0; k < n; ++k) {
    BasisFn& b = basis[k];
    b.x.origin = b.y.origin = fields[0].x.origin;
    b.x.scale = b.y.scale = fields[0].x.scale;
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < 6; ++m) {
        b.x.c[m] += C(j, k) * fields[j].x.c[m];
        b.y.c[m] += C(j, k) * fields[j].y.c[m];
      }
  }
  return basis;
}

std::vector<BasisFn> element_basis(const ReferenceElement& re,
                                   const std::array<Vec2, 3>& tri) {
  return element_basis(re, tri, {true, true, false});
}

FeSpace build_space(const ActiveMesh& am, Family family, int degree,
                    Support support) {
  using K = ReferenceElement::DofKind;
  using GK = FeSpace::DofInfo::Kind;

  FeSpace V;
  V.am = &am;
  V.ref = reference_element(family, degree);
  V.support = support;

  const auto& bg = am.bg;
  const int nt = static_cast<int>(bg.triangles.size());
  const int nv = static_cast<int>(bg.vertices.size());
  const int ne = static_cast<int>(bg.edges.size());

  V.elem_supported.assign(nt, 0);
  for (int t = 0; t < nt; ++t)
    V.elem_supported[t] = support == Support::Active ? am.is_active[t]
                                                     : am.is_cut[t];

  const bool has_vertex = family == Family::Lagrange;
  const bool has_edge_mid = family == Family::Lagrange && degree == 2;
  const int edge_moments =
      family == Family::RaviartThomas ? (degree == 0 ? 1 : 2)
      : family == Family::BrezziDouglasMarini ? 2
                                              : 0;
  const int interior_moments =
      family == Family::RaviartThomas && degree == 1 ? 2 : 0;
  const int cell_points =
      family == Family::Discontinuous ? (degree == 0 ? 1 : 3) : 0;
  V.dofs_per_edge = has_edge_mid ? 1 : edge_moments;

  std::vector<char> vertex_used(nv, 0), edge_used(ne, 0);
  for (int t = 0; t < nt; ++t) {
    if (!V.elem_supported[t]) continue;
    for (int k = 0; k < 3; ++k) {
      if (has_vertex) vertex_used[bg.triangles[t][k]] = 1;
      if (V.dofs_per_edge > 0) edge_used[bg.tri_edges[t][k]] = 1;
    }
  }

  // Global numbering in fixed entity order: vertices, edges, then
  // per-element dofs, each ascending by id.
  std::vector<int> vertex_dof(nv, -1);
  V.edge_dof_start.assign(ne, -1);
  std::vector<int> elem_dof_start(nt, -1);
  int next = 0;
  for (int v = 0; v < nv; ++v)
    if (vertex_used[v]) {
      vertex_dof[v] = next++;
      V.dof_info.push_back({GK::VertexPoint, v, 0});
    }
  for (int e = 0; e < ne; ++e)
    if (edge_used[e]) {
      V.edge_dof_start[e] = next;
      for (int j = 0; j < V.dofs_per_edge; ++j)
        V.dof_info.push_back(
            {has_edge_mid ? GK::EdgeMidpoint : GK::EdgeMoment, e, j});
      next += V.dofs_per_edge;
    }
  for (int t = 0; t < nt; ++t) {
    if (!V.elem_supported[t]) continue;
    if (interior_moments > 0) {
      elem_dof_start[t] = next;
      for (int j = 0; j < interior_moments; ++j)
        V.dof_info.push_back({GK::InteriorMoment, t, j});
      next += interior_moments;
    }
    if (cell_points > 0) {
      elem_dof_start[t] = next;
      for (int j = 0; j < cell_points; ++j)
        V.dof_info.push_back({GK::CellPoint, t, j});
      next += cell_points;
    }
  }
  V.ndofs = next;

  // Per-element dof maps and bases, in reference local order.
  V.elem_dofs.resize(nt);
  V.basis.resize(nt);
  for (int t = 0; t < nt; ++t) {
    if (!V.elem_supported[t]) continue;
    const auto& tv = bg.triangles[t];
    std::array<bool, 3> fwd{};
    for (int k = 0; k < 3; ++k) fwd[k] = tv[k] < tv[(k + 1) % 3];

    auto& map = V.elem_dofs[t];
    map.reserve(V.ref.ndofs());
    for (const auto& dof : V.ref.dofs) {
      switch (dof.kind) {
        case K::VertexPoint:
          map.push_back(vertex_dof[tv[dof.entity]]);
          break;
        case K::EdgeMidpoint:
          map.push_back(V.edge_dof_start[bg.tri_edges[t][dof.entity]]);
          break;
        case K::EdgeMomentP0:
          map.push_back(V.edge_dof_start[bg.tri_edges[t][dof.entity]]);
          break;
        case K::EdgeMomentP1:
          map.push_back(V.edge_dof_start[bg.tri_edges[t][dof.entity]] + 1);
          break;
        case K::InteriorMomentX:
          map.push_back(elem_dof_start[t]);
          break;
        case K::InteriorMomentY:
          map.push_back(elem_dof_start[t] + 1);
          break;
        case K::CellCentroid:
          map.push_back(elem_dof_start[t]);
          break;
        case K::CellVertex:
          map.push_back(elem_dof_start[t] + dof.entity);
          break;
      }
    }
    V.basis[t] = element_basis(V.ref, bg.tri_coords(t), fwd);
  }
  return V;
}

namespace {

/// Shared implementation for both dof_value overloads: one of fs/fv is bound.
double global_dof_value(const FeSpace& V, int dof,
                        const std::function<double(Vec2)>& fs,
                        const std::function<Vec2(Vec2)>& fv) {
  using GK = FeSpace::DofInfo::Kind;
  const auto& bg = V.am->bg;
  const auto& info = V.dof_info.at(dof);
  switch (info.kind) {
    case GK::VertexPoint:
      return fs(bg.vertices[info.entity]);
    case GK::EdgeMidpoint:
      return fs(bg.edge_midpoint(info.entity));
    case GK::EdgeMoment: {
      const int e = info.entity;
      const Vec2 a = bg.vertices[bg.edges[e][0]];
      const Vec2 b = bg.vertices[bg.edges[e][1]];
      const Vec2 t = bg.edge_tangent(e), n = bg.edge_normal(e);
      const double len = bg.edge_length(e);
      const auto rule = segment_quadrature(a, b, kMomentDegree);
      double m = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        double w = rule.weights[q];
        if (info.index == 1)
          w *= 2 * (rule.points[q] - a).dot(t) / len - 1;
        m += w * fv(rule.points[q]).dot(n);
      }
      return m;
    }
    case GK::InteriorMoment: {
      const auto c = bg.tri_coords(info.entity);
      const auto rule = triangle_quadrature(c[0], c[1], c[2], kMomentDegree);
      double m = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 v = fv(rule.points[q]);
        m += rule.weights[q] * (info.index == 0 ? v.x : v.y);
      }
      return m;
    }
    case GK::CellPoint: {
      const auto c = bg.tri_coords(info.entity);
      return fs(V.ref.degree == 0 ? tri_centroid(c) : c[info.index]);
    }
  }
  throw UnsupportedSpaceError("unknown dof kind");
}

}  // namespace

double dof_value(const FeSpace& V, int dof,
                 const std::function<double(Vec2)>& f) {
  if (V.vector_valued())
    throw UnsupportedSpaceError("scalar data applied to a vector space");
  return global_dof_value(V, dof, f, {});
}

double dof_value(const FeSpace& V, int dof,
                 const std::function<Vec2(Vec2)>& f) {
  if (!V.vector_valued())
    throw UnsupportedSpaceError("vector data applied to a scalar space");
  return global_dof_value(V, dof, {}, f);
}

std::vector<double> interpolate(const FeSpace& V,
                                const std::function<double(Vec2)>& f) {
  std::vector<double> u(V.ndofs);
  for (int i = 0; i < V.ndofs; ++i) u[i] = dof_value(V, i, f);
  return u;
}

std::vector<double> interpolate(const FeSpace& V,
                                const std::function<Vec2(Vec2)>& f) {
  std::vector<double> u(V.ndofs);
  for (int i = 0; i < V.ndofs; ++i) u[i] = dof_value(V, i, f);
  return u;
}

namespace {

const std::vector<BasisFn>& checked_basis(const FeSpace& V, int elem) {
  if (!V.elem_supported.at(elem))
    throw UnsupportedSpaceError("evaluation on an unsupported element");
  return V.basis[elem];
}

}  // namespace

double eval_scalar(const FeSpace& V, const std::vector<double>& u, int elem,
                   Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  double s = 0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    s += u[V.elem_dofs[elem][k]] * basis[k].x.value(p);
  return s;
}

Vec2 eval_grad_scalar(const FeSpace& V, const std::vector<double>& u, int elem,
                      Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  Vec2 g{0, 0};
  for (std::size_t k = 0; k < basis.size(); ++k)
    g += basis[k].x.gradient(p) * u[V.elem_dofs[elem][k]];
  return g;
}

Vec2 eval_vector(const FeSpace& V, const std::vector<double>& u, int elem,
                 Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  Vec2 v{0, 0};
  for (std::size_t k = 0; k < basis.size(); ++k)
    v += basis[k].vec(p) * u[V.elem_dofs[elem][k]];
  return v;
}

Mat2 eval_grad_vector(const FeSpace& V, const std::vector<double>& u, int elem,
                      Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  Mat2 g;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Mat2 gk = basis[k].grad(p);
    const double c = u[V.elem_dofs[elem][k]];
    g.a11 += c * gk.a11;
    g.a12 += c * gk.a12;
    g.a21 += c * gk.a21;
    g.a22 += c * gk.a22;
  }
  return g;
}

double eval_div(const FeSpace& V, const std::vector<double>& u, int elem,
                Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  double d = 0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    d += u[V.elem_dofs[elem][k]] * basis[k].div(p);
  return d;
}

double eval_rot(const FeSpace& V, const std::vector<double>& u, int elem,
                Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  double r = 0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    r += u[V.elem_dofs[elem][k]] * basis[k].rot(p);
  return r;
}

Vec2 eval_curl_scalar(const FeSpace& V, const std::vector<double>& u, int elem,
                      Vec2 p) {
  const auto& basis = checked_basis(V, elem);
  Vec2 c{0, 0};
  for (std::size_t k = 0; k < basis.size(); ++k)
    c += basis[k].curl(p) * u[V.elem_dofs[elem][k]];
  return c;
}

}  // namespace cutstokes
