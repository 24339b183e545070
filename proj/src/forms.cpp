#include "cutstokes/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cutstokes {

namespace {

constexpr int kStabDegree = 8;  ///< quadrature for stabilization integrals

/// Polynomial degree of the basis fields, for picking exact quadrature.
int basis_degree(const ReferenceElement& re) {
  return re.family == Family::RaviartThomas ? re.degree + 1 : re.degree;
}

Poly2 poly_add(const Poly2& a, const Poly2& b) {
  Poly2 r = a;
  for (int i = 0; i < 6; ++i) r.c[i] += b.c[i];
  return r;
}

Poly2 poly_negate(const Poly2& a) {
  Poly2 r = a;
  for (double& c : r.c) c = -c;
  return r;
}

/// Assemble sum_T integral over T cap Omega of kernel(a_i, b_j, p) for every
/// pair of local basis functions of two (possibly identical) spaces.
template <class Kernel>
void volume_pair(const BlockSink& out, const FeSpace& A, const FeSpace& B,
                 Kernel&& kernel) {
  const ActiveMesh& am = *A.am;
  const int degree = basis_degree(A.ref) + basis_degree(B.ref) + 2;
  for (int t : am.active_elems) {
    if (!A.elem_supported[t] || !B.elem_supported[t]) continue;
    const auto rule = element_inside_rule(am, t, degree);
    const auto& da = A.elem_dofs[t];
    const auto& db = B.elem_dofs[t];
    const auto& ba = A.basis[t];
    const auto& bb = B.basis[t];
    for (std::size_t i = 0; i < da.size(); ++i)
      for (std::size_t j = 0; j < db.size(); ++j) {
        double s = 0;
        for (std::size_t q = 0; q < rule.size(); ++q)
          s += rule.weights[q] * kernel(ba[i], bb[j], rule.points[q]);
        out.add(da[i], db[j], s);
      }
  }
}

/// Assemble sum over cut elements of integrals along T cap dOmega of
/// kernel(a_i, b_j, p, n, h_T) with the outward interface normal n.
template <class Kernel>
void interface_pair(const BlockSink& out, const FeSpace& A, const FeSpace& B,
                    Kernel&& kernel) {
  const ActiveMesh& am = *A.am;
  const int degree = basis_degree(A.ref) + basis_degree(B.ref) + 2;
  for (int t : am.cut_elems) {
    if (!am.cut_geom[t].is_cut()) continue;  // boundary-touching, no segment
    if (!A.elem_supported[t] || !B.elem_supported[t]) continue;
    const auto ir = interface_rule(am, t, degree);
    const double hT = am.bg.tri_diameter[t];
    const auto& da = A.elem_dofs[t];
    const auto& db = B.elem_dofs[t];
    const auto& ba = A.basis[t];
    const auto& bb = B.basis[t];
    for (std::size_t i = 0; i < da.size(); ++i)
      for (std::size_t j = 0; j < db.size(); ++j) {
        double s = 0;
        for (std::size_t q = 0; q < ir.rule.size(); ++q)
          s += ir.rule.weights[q] *
               kernel(ba[i], bb[j], ir.rule.points[q], ir.normal, hT);
        out.add(da[i], db[j], s);
      }
  }
}

/// Functional over T cap dOmega of the cut elements: kernel(b_i, p, n, h_T).
template <class Kernel>
void interface_functional(const VectorSink& out, const FeSpace& A, int degree,
                          Kernel&& kernel) {
  const ActiveMesh& am = *A.am;
  for (int t : am.cut_elems) {
    if (!am.cut_geom[t].is_cut()) continue;  // boundary-touching, no segment
    if (!A.elem_supported[t]) continue;
    const auto ir = interface_rule(am, t, degree);
    const double hT = am.bg.tri_diameter[t];
    const auto& da = A.elem_dofs[t];
    const auto& ba = A.basis[t];
    for (std::size_t i = 0; i < da.size(); ++i) {
      double s = 0;
      for (std::size_t q = 0; q < ir.rule.size(); ++q)
        s += ir.rule.weights[q] * kernel(ba[i], ir.rule.points[q], ir.normal, hT);
      out.add(da[i], s);
    }
  }
}

/// Visit the selected boundary pieces: f(element, rule, outward unit normal).
template <class Visitor>
void for_each_boundary_piece(const ActiveMesh& am, BoundaryParts parts,
                             int degree, Visitor&& f) {
  if (parts != BoundaryParts::Fitted) {
    for (int t : am.cut_elems) {
      const auto& cg = am.cut_geom[t];
      if (!cg.is_cut()) continue;  // boundary-touching element, no segment
      f(t, segment_quadrature(cg.seg_a, cg.seg_b, degree), cg.normal);
    }
  }
  if (parts != BoundaryParts::Interface) {
    for (const auto& bf : am.boundary_facets())
      f(bf.element, segment_quadrature(bf.a, bf.b, degree), bf.outward_normal());
  }
}

double penalty_weight(const NitschePenalty& pen, Vec2 u, Vec2 v, Vec2 n) {
  if (!pen.split) return pen.lambda * u.dot(v);
  const Vec2 tv = n.rot_ccw();
  return pen.lambda_t * u.dot(tv) * v.dot(tv) + pen.lambda_n * u.dot(n) * v.dot(n);
}

Vec2 grad_dot_n(const BasisFn& b, Vec2 p, Vec2 n) {
  return {b.x.gradient(p).dot(n), b.y.gradient(p).dot(n)};
}

/// Quantity of one basis function entering a stabilization jump, as a pair of
/// polynomials in the element frame (second component zero for scalars).
struct QtyPolys {
  Poly2 x, y;
};

QtyPolys quantity_polys(const BasisFn& b, bool vector_valued, StabQuantity q) {
  switch (q) {
    case StabQuantity::Value:
      return vector_valued ? QtyPolys{b.x, b.y} : QtyPolys{b.x, Poly2{}};
    case StabQuantity::Divergence:
      return {poly_add(poly_partial(b.x, 0), poly_partial(b.y, 1)), Poly2{}};
    case StabQuantity::Curl:
      return {poly_negate(poly_partial(b.x, 1)), poly_partial(b.x, 0)};
  }
  throw std::logic_error("unreachable");
}

/// Union of the dofs of a space over the two elements of a stabilized edge,
/// with the quantity polynomial of each dof on each side (zero when the dof
/// has no support there).
struct EdgeUnion {
  std::vector<int> gdofs;
  std::vector<std::array<QtyPolys, 2>> qp;  ///< per dof, per side
};

EdgeUnion gather_edge_union(const FeSpace& S, StabQuantity q, int t0, int t1) {
  EdgeUnion u;
  const std::array<int, 2> tt{t0, t1};
  for (int side = 0; side < 2; ++side) {
    const auto& dl = S.elem_dofs[tt[side]];
    const auto& bl = S.basis[tt[side]];
    for (std::size_t k = 0; k < dl.size(); ++k) {
      const auto it = std::find(u.gdofs.begin(), u.gdofs.end(), dl[k]);
      std::size_t pos;
      if (it == u.gdofs.end()) {
        u.gdofs.push_back(dl[k]);
        u.qp.emplace_back();
        pos = u.gdofs.size() - 1;
      } else {
        pos = static_cast<std::size_t>(it - u.gdofs.begin());
      }
      u.qp[pos][side] = quantity_polys(bl[k], S.vector_valued(), q);
    }
  }
  return u;
}

}  // namespace

QuadratureRule element_inside_rule(const ActiveMesh& am, int elem, int degree) {
  const CutRegion& cr = am.cut_geom[elem];
  if (cr.kind == CutRegion::Kind::Outside) return {};
  if (cr.is_cut()) return polygon_quadrature(cr.inside, degree);
  const auto c = am.bg.tri_coords(elem);
  return triangle_quadrature(c[0], c[1], c[2], degree);
}

InterfaceRule interface_rule(const ActiveMesh& am, int elem, int degree) {
  const CutRegion& cr = am.cut_geom[elem];
  if (!cr.is_cut())
    throw std::invalid_argument("interface_rule: element is not cut");
  return {segment_quadrature(cr.seg_a, cr.seg_b, degree), cr.normal};
}

void add_mass_scalar(const BlockSink& out, const FeSpace& W, double coeff) {
  volume_pair(out, W, W, [coeff](const BasisFn& a, const BasisFn& b, Vec2 p) {
    return coeff * a.x.value(p) * b.x.value(p);
  });
}

void add_viscous(const BlockSink& out, const FeSpace& V, double mu) {
  volume_pair(out, V, V, [mu](const BasisFn& a, const BasisFn& b, Vec2 p) {
    const Mat2 Ga = a.grad(p), Gb = b.grad(p);
    return mu * (Ga.a11 * Gb.a11 + Ga.a12 * Gb.a12 + Ga.a21 * Gb.a21 +
                 Ga.a22 * Gb.a22);
  });
}

void add_div_pressure(const BlockSink& out, const FeSpace& V, const FeSpace& Q) {
  volume_pair(out, V, Q, [](const BasisFn& a, const BasisFn& b, Vec2 p) {
    return a.div(p) * b.x.value(p);
  });
}

void add_curl_coupling(const BlockSink& out, const FeSpace& W, const FeSpace& V) {
  volume_pair(out, W, V, [](const BasisFn& a, const BasisFn& b, Vec2 p) {
    return a.curl(p).dot(b.vec(p));
  });
}

void add_coriolis(const BlockSink& out, const FeSpace& V, double lambda) {
  volume_pair(out, V, V, [lambda](const BasisFn& a, const BasisFn& b, Vec2 p) {
    const Vec2 u = a.vec(p), v = b.vec(p);
    return 2.0 * lambda * (-u.y * v.x + u.x * v.y);
  });
}

void add_load(const VectorSink& out, const FeSpace& V, const VectorField& f,
              int degree) {
  const ActiveMesh& am = *V.am;
  for (int t : am.active_elems) {
    if (!V.elem_supported[t]) continue;
    const auto rule = element_inside_rule(am, t, degree);
    const auto& dv = V.elem_dofs[t];
    const auto& bv = V.basis[t];
    for (std::size_t i = 0; i < dv.size(); ++i) {
      double s = 0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * f(rule.points[q]).dot(bv[i].vec(rule.points[q]));
      out.add(dv[i], s);
    }
  }
}

void add_nitsche(const BlockSink& out, const FeSpace& V, double mu,
                 const NitschePenalty& pen) {
  interface_pair(out, V, V,
                 [mu, &pen](const BasisFn& a, const BasisFn& b, Vec2 p, Vec2 n,
                            double hT) {
                   const Vec2 u = a.vec(p), v = b.vec(p);
                   const Vec2 dnu = grad_dot_n(a, p, n), dnv = grad_dot_n(b, p, n);
                   return -mu * dnu.dot(v) + u.dot(dnv) * mu +
                          penalty_weight(pen, u, v, n) / hT;
                 });
}

void add_nitsche_data(const VectorSink& out, const FeSpace& V, double mu,
                      const NitschePenalty& pen, const VectorField& g) {
  interface_functional(out, V, 9 + basis_degree(V.ref),
                       [mu, &pen, &g](const BasisFn& b, Vec2 p, Vec2 n, double hT) {
                         const Vec2 v = b.vec(p);
                         const Vec2 dnv = grad_dot_n(b, p, n);
                         return penalty_weight(pen, g(p), v, n) / hT +
                                g(p).dot(dnv) * mu;
                       });
}

void add_normal_penalty(const BlockSink& out, const FeSpace& V, double lambda) {
  interface_pair(out, V, V,
                 [lambda](const BasisFn& a, const BasisFn& b, Vec2 p, Vec2 n,
                          double hT) {
                   return lambda / hT * a.vec(p).dot(n) * b.vec(p).dot(n);
                 });
}

void add_normal_penalty_data(const VectorSink& out, const FeSpace& V,
                             double lambda, const VectorField& g) {
  interface_functional(out, V, 9 + basis_degree(V.ref),
                       [lambda, &g](const BasisFn& b, Vec2 p, Vec2 n, double hT) {
                         return lambda / hT * g(p).dot(n) * b.vec(p).dot(n);
                       });
}

void add_pressure_interface(const BlockSink& out, const FeSpace& V,
                            const FeSpace& Q) {
  interface_pair(out, V, Q,
                 [](const BasisFn& a, const BasisFn& b, Vec2 p, Vec2 n, double) {
                   return a.vec(p).dot(n) * b.x.value(p);
                 });
}

void add_multiplier_coupling(const BlockSink& out, const FeSpace& M,
                             const FeSpace& V) {
  // The multiplier imposes u . n on the unfitted boundary only; fitted
  // facets keep their strong rows.
  interface_pair(out, M, V,
                 [](const BasisFn& a, const BasisFn& b, Vec2 p, Vec2 n, double) {
                   return a.x.value(p) * b.vec(p).dot(n);
                 });
}

void add_multiplier_data(const VectorSink& out, const FeSpace& M,
                         const VectorField& g) {
  const int degree = 9 + basis_degree(M.ref);
  interface_functional(out, M, degree,
                       [&g](const BasisFn& b, Vec2 p, Vec2 n, double) {
                         return g(p).dot(n) * b.x.value(p);
                       });
}

void add_boundary_flux(const VectorSink& out, const FeSpace& V,
                       BoundaryParts parts) {
  const ActiveMesh& am = *V.am;
  for_each_boundary_piece(
      am, parts, basis_degree(V.ref) + 1,
      [&](int t, const QuadratureRule& rule, Vec2 n) {
        if (!V.elem_supported[t]) return;
        const auto& dv = V.elem_dofs[t];
        const auto& bv = V.basis[t];
        for (std::size_t i = 0; i < dv.size(); ++i) {
          double s = 0;
          for (std::size_t q = 0; q < rule.size(); ++q)
            s += rule.weights[q] * bv[i].vec(rule.points[q]).dot(n);
          out.add(dv[i], s);
        }
      });
}

double boundary_flux_of_data(const ActiveMesh& am, const VectorField& g,
                             BoundaryParts parts, int degree) {
  double total = 0;
  for_each_boundary_piece(am, parts, degree,
                          [&](int, const QuadratureRule& rule, Vec2 n) {
                            for (std::size_t q = 0; q < rule.size(); ++q)
                              total += rule.weights[q] * g(rule.points[q]).dot(n);
                          });
  return total;
}

void add_mean_value(const VectorSink& out, const FeSpace& Q) {
  const ActiveMesh& am = *Q.am;
  for (int t : am.active_elems) {
    if (!Q.elem_supported[t]) continue;
    const auto rule = element_inside_rule(am, t, basis_degree(Q.ref) + 1);
    const auto& dq = Q.elem_dofs[t];
    const auto& bq = Q.basis[t];
    for (std::size_t i = 0; i < dq.size(); ++i) {
      double s = 0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * bq[i].x.value(rule.points[q]);
      out.add(dq[i], s);
    }
  }
}

namespace {

/// Shared body of the scalar boundary functionals: integrand(p, n) times the
/// scalar basis value (or times v.n for the normal-data variant).
template <class Integrand>
void boundary_scalar_functional(const VectorSink& out, const FeSpace& W,
                                BoundaryParts parts, int degree,
                                Integrand&& weight, bool against_normal) {
  const ActiveMesh& am = *W.am;
  for_each_boundary_piece(
      am, parts, degree, [&](int t, const QuadratureRule& rule, Vec2 n) {
        if (!W.elem_supported[t]) return;
        const auto& dw = W.elem_dofs[t];
        const auto& bw = W.basis[t];
        for (std::size_t i = 0; i < dw.size(); ++i) {
          double s = 0;
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 p = rule.points[q];
            const double basis =
                against_normal ? bw[i].vec(p).dot(n) : bw[i].x.value(p);
            s += rule.weights[q] * weight(p, n) * basis;
          }
          out.add(dw[i], s);
        }
      });
}

}  // namespace

void add_tangential_data_scalar(const VectorSink& out, const FeSpace& W,
                                const VectorField& g, BoundaryParts parts,
                                int degree) {
  boundary_scalar_functional(
      out, W, parts, degree + basis_degree(W.ref),
      [&g](Vec2 p, Vec2 n) { return g(p).dot(n.rot_ccw()); }, false);
}

void add_scalar_boundary_data(const VectorSink& out, const FeSpace& W,
                              const ScalarField& s, BoundaryParts parts,
                              int degree) {
  boundary_scalar_functional(
      out, W, parts, degree + basis_degree(W.ref),
      [&s](Vec2 p, Vec2) { return s(p); }, false);
}

void add_normal_boundary_data(const VectorSink& out, const FeSpace& V,
                              const ScalarField& p0, BoundaryParts parts,
                              int degree) {
  boundary_scalar_functional(
      out, V, parts, degree + basis_degree(V.ref),
      [&p0](Vec2 p, Vec2) { return p0(p); }, true);
}

void add_tangential_ip(const BlockSink& out, const FeSpace& V, double mu,
                       double lambda_t) {
  const ActiveMesh& am = *V.am;
  const BackgroundMesh& bg = am.bg;
  const int degree = 2 * basis_degree(V.ref) + 2;
  for (int e : am.active_edges) {
    const auto seg = am.edge_inside_segment(e);
    if (!seg || (seg->second - seg->first).norm() < 1e-14) continue;
    const int t0 = bg.edge_tris[e][0], t1 = bg.edge_tris[e][1];
    if (!V.elem_supported[t0] || !V.elem_supported[t1]) continue;
    const Vec2 tv = bg.edge_tangent(e);
    // Orient the normal out of t0 so that the mean-flux and jump terms agree
    // on a side (the form itself is invariant under the joint flip).
    Vec2 n = bg.edge_normal(e);
    const auto c0 = bg.tri_coords(t0), c1 = bg.tri_coords(t1);
    const Vec2 towards = (c1[0] + c1[1] + c1[2] - c0[0] - c0[1] - c0[2]) / 3.0;
    if (n.dot(towards) < 0) n = n * -1.0;
    const double hF = bg.edge_length(e);
    const auto rule = segment_quadrature(seg->first, seg->second, degree);

    const auto u = gather_edge_union(V, StabQuantity::Value, t0, t1);
    // Tangential trace and its normal flux per dof and side, per point.
    const auto side_vals = [&](const QtyPolys& qp, Vec2 p) {
      const Vec2 val{qp.x.value(p), qp.y.value(p)};
      const Vec2 flux{qp.x.gradient(p).dot(n), qp.y.gradient(p).dot(n)};
      return std::pair{val.dot(tv), flux.dot(tv)};
    };
    for (std::size_t i = 0; i < u.gdofs.size(); ++i)
      for (std::size_t j = 0; j < u.gdofs.size(); ++j) {
        double s = 0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec2 p = rule.points[q];
          const auto [ut0, du0] = side_vals(u.qp[i][0], p);
          const auto [ut1, du1] = side_vals(u.qp[i][1], p);
          const auto [vt0, dv0] = side_vals(u.qp[j][0], p);
          const auto [vt1, dv1] = side_vals(u.qp[j][1], p);
          const double ju = ut0 - ut1, jv = vt0 - vt1;
          const double mdu = 0.5 * mu * (du0 + du1), mdv = 0.5 * mu * (dv0 + dv1);
          s += rule.weights[q] * (-mdu * jv + ju * mdv + lambda_t / hF * ju * jv);
        }
        out.add(u.gdofs[i], u.gdofs[j], s);
      }
  }
}

void add_fitted_tangential(const BlockSink& out, const FeSpace& V, double mu,
                           const NitschePenalty& pen) {
  const ActiveMesh& am = *V.am;
  const double lambda = pen.split ? pen.lambda_t : pen.lambda;
  const int degree = 2 * basis_degree(V.ref) + 2;
  for (const auto& bf : am.boundary_facets()) {
    const int t = bf.element;
    if (!V.elem_supported[t]) continue;
    const Vec2 n = bf.outward_normal();
    const Vec2 tv = n.rot_ccw();
    const double hT = am.bg.tri_diameter[t];
    const auto rule = segment_quadrature(bf.a, bf.b, degree);
    const auto& dv = V.elem_dofs[t];
    const auto& bv = V.basis[t];
    for (std::size_t i = 0; i < dv.size(); ++i)
      for (std::size_t j = 0; j < dv.size(); ++j) {
        double s = 0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const Vec2 p = rule.points[q];
          const double ut = bv[i].vec(p).dot(tv), vt = bv[j].vec(p).dot(tv);
          const double du = grad_dot_n(bv[i], p, n).dot(tv);
          const double dw = grad_dot_n(bv[j], p, n).dot(tv);
          s += rule.weights[q] *
               (-mu * du * vt + ut * mu * dw + lambda / hT * ut * vt);
        }
        out.add(dv[i], dv[j], s);
      }
  }
}

void add_fitted_tangential_data(const VectorSink& out, const FeSpace& V,
                                double mu, const NitschePenalty& pen,
                                const VectorField& g) {
  const ActiveMesh& am = *V.am;
  const double lambda = pen.split ? pen.lambda_t : pen.lambda;
  for (const auto& bf : am.boundary_facets()) {
    const int t = bf.element;
    if (!V.elem_supported[t]) continue;
    const Vec2 n = bf.outward_normal();
    const Vec2 tv = n.rot_ccw();
    const double hT = am.bg.tri_diameter[t];
    const auto rule = segment_quadrature(bf.a, bf.b, 9 + basis_degree(V.ref));
    const auto& dv = V.elem_dofs[t];
    const auto& bv = V.basis[t];
    for (std::size_t i = 0; i < dv.size(); ++i) {
      double s = 0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2 p = rule.points[q];
        const double vt = bv[i].vec(p).dot(tv);
        const double dw = grad_dot_n(bv[i], p, n).dot(tv);
        s += rule.weights[q] * g(p).dot(tv) * (mu * dw + lambda / hT * vt);
      }
      out.add(dv[i], s);
    }
  }
}

void add_ghost_penalty(const BlockSink& out, const FeSpace& rows,
                       StabQuantity qrow, const FeSpace& cols,
                       StabQuantity qcol, int jmin, int jmax,
                       const std::vector<double>& weight,
                       const std::vector<int>& edges, StabFlavor flavor) {
  if (jmax < jmin) return;
  if (static_cast<int>(weight.size()) != jmax - jmin + 1)
    throw std::invalid_argument("add_ghost_penalty: weight count mismatch");
  const ActiveMesh& am = *rows.am;
  const BackgroundMesh& bg = am.bg;
  for (int e : edges) {
    const int t0 = bg.edge_tris[e][0], t1 = bg.edge_tris[e][1];
    if (t1 < 0)
      throw std::invalid_argument("add_ghost_penalty: edge on the mesh rim");
    if (!rows.elem_supported[t0] || !rows.elem_supported[t1] ||
        !cols.elem_supported[t0] || !cols.elem_supported[t1])
      throw std::invalid_argument(
          "add_ghost_penalty: edge between unsupported elements");
    const Vec2 n = bg.edge_normal(e);
    const auto ru = gather_edge_union(rows, qrow, t0, t1);
    const auto cu = gather_edge_union(cols, qcol, t0, t1);

    const auto accumulate = [&](const QuadratureRule& rule) {
      for (std::size_t i = 0; i < ru.gdofs.size(); ++i)
        for (std::size_t j = 0; j < cu.gdofs.size(); ++j) {
          double s = 0;
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 p = rule.points[q];
            for (int jj = jmin; jj <= jmax; ++jj) {
              const double jrx = ru.qp[i][0].x.dderiv(p, n, jj) -
                                 ru.qp[i][1].x.dderiv(p, n, jj);
              const double jry = ru.qp[i][0].y.dderiv(p, n, jj) -
                                 ru.qp[i][1].y.dderiv(p, n, jj);
              const double jcx = cu.qp[j][0].x.dderiv(p, n, jj) -
                                 cu.qp[j][1].x.dderiv(p, n, jj);
              const double jcy = cu.qp[j][0].y.dderiv(p, n, jj) -
                                 cu.qp[j][1].y.dderiv(p, n, jj);
              s += rule.weights[q] * weight[jj - jmin] * (jrx * jcx + jry * jcy);
            }
          }
          if (s != 0.0) out.add(ru.gdofs[i], cu.gdofs[j], s);
        }
    };

    if (flavor == StabFlavor::EdgeJump) {
      accumulate(segment_quadrature(bg.vertices[bg.edges[e][0]],
                                    bg.vertices[bg.edges[e][1]], kStabDegree));
    } else {
      for (int t : {t0, t1}) {
        const auto c = bg.tri_coords(t);
        accumulate(triangle_quadrature(c[0], c[1], c[2], kStabDegree));
      }
    }
  }
}

void add_stab_velocity(const BlockSink& out, const FeSpace& V, double tau_a,
                       double gamma_a, const std::vector<int>& edges,
                       StabFlavor flavor) {
  const double h = V.am->bg.h;
  const int k = V.ref.degree;
  if (flavor == StabFlavor::EdgeJump) {
    std::vector<double> w;
    for (int j = 0; j <= k + 1; ++j)
      w.push_back(tau_a * std::pow(h, 2 * j + gamma_a));
    add_ghost_penalty(out, V, StabQuantity::Value, V, StabQuantity::Value, 0,
                      k + 1, w, edges, flavor);
  } else {
    const std::vector<double> w(k + 1, tau_a * std::pow(h, 1.0 - gamma_a));
    add_ghost_penalty(out, V, StabQuantity::Value, V, StabQuantity::Value, 0, k,
                      w, edges, flavor);
  }
}

void add_stab_div_pressure(const BlockSink& out, const FeSpace& V,
                           const FeSpace& Q, double tau_b,
                           const std::vector<int>& edges, StabFlavor flavor) {
  const double h = V.am->bg.h;
  if (flavor == StabFlavor::EdgeJump) {
    const int khat = Q.ref.degree;
    std::vector<double> w;
    for (int j = 0; j <= khat; ++j) w.push_back(tau_b * std::pow(h, 2 * j + 1));
    add_ghost_penalty(out, V, StabQuantity::Divergence, Q, StabQuantity::Value,
                      0, khat, w, edges, flavor);
  } else {
    const int k = V.ref.degree;
    const std::vector<double> w(k + 1, tau_b);
    add_ghost_penalty(out, V, StabQuantity::Divergence, Q, StabQuantity::Value,
                      0, k, w, edges, flavor);
  }
}

void add_stab_vorticity(const BlockSink& out, const FeSpace& W, double tau_m,
                        const std::vector<int>& edges, StabFlavor flavor) {
  const double h = W.am->bg.h;
  const int k = W.ref.degree - 1;
  if (k < 1) return;  // degree-one vorticity has no penalized orders
  std::vector<double> w;
  for (int j = 1; j <= k; ++j)
    w.push_back(flavor == StabFlavor::EdgeJump ? tau_m * std::pow(h, 2 * j + 1)
                                               : tau_m);
  add_ghost_penalty(out, W, StabQuantity::Value, W, StabQuantity::Value, 1, k,
                    w, edges, flavor);
}

void add_stab_curl_velocity(const BlockSink& out, const FeSpace& W,
                            const FeSpace& V, double tau_c,
                            const std::vector<int>& edges, StabFlavor flavor) {
  const double h = W.am->bg.h;
  const int k = V.ref.degree;
  std::vector<double> w;
  for (int j = 0; j <= k; ++j)
    w.push_back(flavor == StabFlavor::EdgeJump ? tau_c * std::pow(h, 2 * j + 1)
                                               : tau_c);
  add_ghost_penalty(out, W, StabQuantity::Curl, V, StabQuantity::Value, 0, k, w,
                    edges, flavor);
}

void add_stab_pressure(const BlockSink& out, const FeSpace& Q, double tau_p,
                       int k, const std::vector<int>& edges, StabFlavor flavor) {
  const double h = Q.am->bg.h;
  if (flavor == StabFlavor::EdgeJump) {
    const int khat = Q.ref.degree;
    std::vector<double> w;
    for (int j = 0; j <= khat; ++j) w.push_back(tau_p * std::pow(h, 2 * j + 1));
    add_ghost_penalty(out, Q, StabQuantity::Value, Q, StabQuantity::Value, 0,
                      khat, w, edges, flavor);
  } else {
    const std::vector<double> w(k + 1, tau_p);
    add_ghost_penalty(out, Q, StabQuantity::Value, Q, StabQuantity::Value, 0, k,
                      w, edges, flavor);
  }
}

void add_stab_multiplier(const BlockSink& out, const FeSpace& M, double tau_xi,
                         const std::vector<int>& edges) {
  const double h = M.am->bg.h;
  const int ktilde = M.ref.degree;
  std::vector<double> w;
  for (int j = 0; j <= ktilde; ++j) w.push_back(tau_xi * std::pow(h, 2 * j));
  add_ghost_penalty(out, M, StabQuantity::Value, M, StabQuantity::Value, 0,
                    ktilde, w, edges, StabFlavor::EdgeJump);
}

}  // namespace cutstokes
