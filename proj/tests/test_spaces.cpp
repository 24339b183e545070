/// Reference elements, dof duality, conformity, and interpolation.
///
/// Duality is checked by re-applying every dof functional to the constructed
/// basis on random physical triangles.  Conformity and the discrete sequence
/// property are checked with random coefficient vectors on a cut mesh.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cutstokes/spaces.hpp"

using namespace cutstokes;

namespace {

std::array<Vec2, 3> random_ccw_triangle(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::array<Vec2, 3> t{Vec2{u(rng), u(rng)}, Vec2{u(rng), u(rng)},
                          Vec2{u(rng), u(rng)}};
    const double a2 = (t[1] - t[0]).cross(t[2] - t[0]);
    if (std::abs(a2) < 0.1) continue;
    if (a2 < 0) std::swap(t[1], t[2]);
    return t;
  }
}

/// Interior sample points of element `t` (barycentric lattice, off edges).
std::vector<Vec2> interior_points(const BackgroundMesh& bg, int t, int n = 4) {
  const auto c = bg.tri_coords(t);
  std::vector<Vec2> pts;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n - i; ++j)
      pts.push_back(c[0] + (c[1] - c[0]) * (double(i) / n) +
                    (c[2] - c[0]) * (double(j) / n));
  pts.push_back((c[0] + c[1] + c[2]) / 3.0);
  return pts;
}

/// Active element containing p (barycentric test with tolerance).
int locate(const ActiveMesh& am, Vec2 p) {
  for (int t : am.active_elems) {
    const auto c = am.bg.tri_coords(t);
    const double d = (c[1] - c[0]).cross(c[2] - c[0]);
    const double a = (c[1] - p).cross(c[2] - p) / d;
    const double b = (c[2] - p).cross(c[0] - p) / d;
    if (a >= -1e-12 && b >= -1e-12 && 1 - a - b >= -1e-12) return t;
  }
  return -1;
}

double sup_interp_error(const ActiveMesh& am, const FeSpace& V,
                        const std::function<Vec2(Vec2)>& f) {
  const auto u = interpolate(V, f);
  double sup = 0.0;
  for (int t : am.active_elems)
    for (const Vec2 p : interior_points(am.bg, t))
      sup = std::max(sup, (eval_vector(V, u, t, p) - f(p)).norm());
  return sup;
}

}  // namespace

TEST_CASE("reference element inventory and rejection") {
  CHECK(reference_element(Family::RaviartThomas, 0).ndofs() == 3);
  CHECK(reference_element(Family::RaviartThomas, 1).ndofs() == 8);
  CHECK(reference_element(Family::BrezziDouglasMarini, 1).ndofs() == 6);
  CHECK(reference_element(Family::Lagrange, 1).ndofs() == 3);
  CHECK(reference_element(Family::Lagrange, 2).ndofs() == 6);
  CHECK(reference_element(Family::Discontinuous, 0).ndofs() == 1);
  CHECK(reference_element(Family::Discontinuous, 1).ndofs() == 3);
  CHECK(!reference_element(Family::Lagrange, 2).vector_valued);
  CHECK(reference_element(Family::RaviartThomas, 1).vector_valued);

  CHECK_THROWS_AS(reference_element(Family::Lagrange, 3), UnsupportedSpaceError);
  CHECK_THROWS_AS(reference_element(Family::BrezziDouglasMarini, 2),
                  UnsupportedSpaceError);
  CHECK_THROWS_AS(reference_element(Family::RaviartThomas, 2),
                  UnsupportedSpaceError);
  CHECK_THROWS_AS(reference_element(Family::Discontinuous, 2),
                  UnsupportedSpaceError);

  CHECK(pressure_partner_degree(Family::RaviartThomas, 0) == 0);
  CHECK(pressure_partner_degree(Family::RaviartThomas, 1) == 1);
  CHECK(pressure_partner_degree(Family::BrezziDouglasMarini, 1) == 0);
}

TEST_CASE("Kronecker duality on random physical triangles") {
  std::mt19937 rng(7);
  for (const auto& [family, degree] :
       {std::pair{Family::Lagrange, 1}, std::pair{Family::Lagrange, 2},
        std::pair{Family::RaviartThomas, 0}, std::pair{Family::RaviartThomas, 1},
        std::pair{Family::BrezziDouglasMarini, 1},
        std::pair{Family::Discontinuous, 0},
        std::pair{Family::Discontinuous, 1}}) {
      const auto re = reference_element(family, degree);
      for (int trial = 0; trial < 5; ++trial) {
        const auto tri = random_ccw_triangle(rng);
        const auto basis = element_basis(re, tri);
        REQUIRE(static_cast<int>(basis.size()) == re.ndofs());
        for (int i = 0; i < re.ndofs(); ++i)
          for (int j = 0; j < re.ndofs(); ++j) {
            const auto& b = basis[j];
            const double fij = apply_local_dof(
                re, tri, {true, true, false}, i,
                [&](Vec2 p) { return b.x.value(p); },
                [&](Vec2 p) { return b.vec(p); });
            CHECK(std::abs(fij - (i == j ? 1.0 : 0.0)) < 1e-12);
          }
      }
    }
}

TEST_CASE("RT0 basis: unit edge fluxes give constant divergence ±1/|T|") {
  std::mt19937 rng(21);
  const auto re = reference_element(Family::RaviartThomas, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto tri = random_ccw_triangle(rng);
    const double area = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    const auto basis = element_basis(re, tri);
    // Local edges (0,1) and (1,2) run with the boundary orientation, so the
    // global normal is outward there; edge (2,0) is parameterized from the
    // lower index 0, so its normal points inward.
    const std::array<double, 3> sigma{1.0, 1.0, -1.0};
    for (int i = 0; i < 3; ++i) {
      const Vec2 c = (tri[0] + tri[1] + tri[2]) / 3.0;
      for (const Vec2 p : {c, tri[0], (tri[1] + tri[2]) * 0.5})
        CHECK(basis[i].div(p) ==
              doctest::Approx(sigma[i] / area).epsilon(1e-12));
    }
  }
}

TEST_CASE("P2 Lagrange delta property at vertices and edge midpoints") {
  std::mt19937 rng(3);
  const auto re = reference_element(Family::Lagrange, 2);
  const auto tri = random_ccw_triangle(rng);
  const auto basis = element_basis(re, tri);
  std::vector<Vec2> nodes{tri[0], tri[1], tri[2],
                          (tri[0] + tri[1]) * 0.5, (tri[1] + tri[2]) * 0.5,
                          (tri[2] + tri[0]) * 0.5};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(basis[j].x.value(nodes[i]) ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("global dof counts on the unit-square cell pair") {
  const auto bg = build_background({0, 0, 1, 1}, 1, 1, DiagonalPattern::Uniform);
  const auto am = classify(bg, LevelSetDomain::all_inside(bg.bbox), 1.0);

  CHECK(build_space(am, Family::RaviartThomas, 0).ndofs == 5);
  CHECK(build_space(am, Family::BrezziDouglasMarini, 1).ndofs == 10);
  CHECK(build_space(am, Family::RaviartThomas, 1).ndofs == 14);
  CHECK(build_space(am, Family::Lagrange, 1).ndofs == 4);
  CHECK(build_space(am, Family::Lagrange, 2).ndofs == 9);
  CHECK(build_space(am, Family::Discontinuous, 0).ndofs == 2);
  CHECK(build_space(am, Family::Discontinuous, 1).ndofs == 6);
}

TEST_CASE("multiplier space lives on the cut band only") {
  const auto bg =
      build_background({0, 0, 1, 1}, 8, 8, DiagonalPattern::Alternating);
  const auto am = classify(bg, LevelSetDomain::disk({0.5, 0.5}, 0.4, bg.bbox), 1.0);
  REQUIRE(!am.cut_elems.empty());

  const auto M0 = build_space(am, Family::Discontinuous, 0, Support::CutBand);
  const auto M1 = build_space(am, Family::Discontinuous, 1, Support::CutBand);
  CHECK(M0.ndofs == static_cast<int>(am.cut_elems.size()));
  CHECK(M1.ndofs == 3 * static_cast<int>(am.cut_elems.size()));
  for (int t : am.active_elems) {
    if (am.is_cut[t]) {
      CHECK(M0.elem_dofs[t].size() == 1);
    } else {
      CHECK(M0.elem_dofs[t].empty());
      CHECK(!M0.elem_supported[t]);
    }
  }
}

TEST_CASE("interpolation reproduces fields inside the space") {
  const auto bg =
      build_background({0, 0, 1, 1}, 8, 8, DiagonalPattern::Alternating);
  const auto am = classify(bg, LevelSetDomain::disk({0.5, 0.5}, 0.4, bg.bbox), 1.0);

  const auto rt0 = build_space(am, Family::RaviartThomas, 0);
  const auto bdm1 = build_space(am, Family::BrezziDouglasMarini, 1);
  const auto rt1 = build_space(am, Family::RaviartThomas, 1);

  CHECK(sup_interp_error(am, rt0, [](Vec2) { return Vec2{1, 2}; }) < 1e-11);
  CHECK(sup_interp_error(am, bdm1, [](Vec2 p) { return Vec2{p.x, -p.y}; }) <
        1e-11);
  CHECK(sup_interp_error(am, rt1, [](Vec2 p) {
          return Vec2{p.x + 2 * p.y, 3 * p.x - p.y};
        }) < 1e-11);
  // The homogeneous RT tail: (x^2, xy) = x * (x, y).
  CHECK(sup_interp_error(am, rt1, [](Vec2 p) {
          return Vec2{p.x * p.x, p.x * p.y};
        }) < 1e-11);

  // (x, -y) is solenoidal; its BDM interpolant is too, pointwise.
  const auto u = interpolate(bdm1, std::function<Vec2(Vec2)>(
                                       [](Vec2 p) { return Vec2{p.x, -p.y}; }));
  for (int t : am.active_elems)
    for (const Vec2 p : interior_points(bg, t))
      CHECK(std::abs(eval_div(bdm1, u, t, p)) < 1e-11);

  // Scalar families.
  const auto p2 = build_space(am, Family::Lagrange, 2);
  const auto w = interpolate(p2, std::function<double(Vec2)>([](Vec2 p) {
                               return p.x * p.x - 3 * p.x * p.y + 2 * p.y;
                             }));
  for (int t : am.active_elems)
    for (const Vec2 p : interior_points(bg, t)) {
      CHECK(eval_scalar(p2, w, t, p) ==
            doctest::Approx(p.x * p.x - 3 * p.x * p.y + 2 * p.y)
                .epsilon(1e-11));
      const Vec2 g = eval_grad_scalar(p2, w, t, p);
      CHECK(g.x == doctest::Approx(2 * p.x - 3 * p.y).epsilon(1e-10));
      CHECK(g.y == doctest::Approx(-3 * p.x + 2).epsilon(1e-10));
    }
}

TEST_CASE("fields outside RT1 interpolate at second order") {
  const auto f = [](Vec2 p) { return Vec2{p.y * p.y, p.x * p.x}; };
  double err[2];
  int k = 0;
  for (int n : {4, 8}) {
    const auto bg =
        build_background({0, 0, 1, 1}, n, n, DiagonalPattern::Uniform);
    const auto am = classify(bg, LevelSetDomain::all_inside(bg.bbox), 1.0);
    const auto rt1 = build_space(am, Family::RaviartThomas, 1);
    err[k++] = sup_interp_error(am, rt1, f);
  }
  CHECK(err[0] > 0.0);
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[0] / err[1] < 5.5);
}

TEST_CASE("H(div) conformity and Lagrange continuity across interior edges") {
  const auto bg =
      build_background({0, 0, 1, 1}, 6, 6, DiagonalPattern::Alternating);
  const auto am = classify(bg, LevelSetDomain::disk({0.5, 0.5}, 0.4, bg.bbox), 1.0);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  for (const auto& [family, degree] :
       {std::pair{Family::RaviartThomas, 0},
        std::pair{Family::BrezziDouglasMarini, 1},
        std::pair{Family::RaviartThomas, 1}}) {
    const auto V = build_space(am, family, degree);
    std::vector<double> u(V.ndofs);
    for (double& c : u) c = coeff(rng);
    for (int e : am.active_edges) {
      const int t0 = bg.edge_tris[e][0], t1 = bg.edge_tris[e][1];
      const Vec2 n = bg.edge_normal(e);
      const Vec2 a = bg.vertices[bg.edges[e][0]], b = bg.vertices[bg.edges[e][1]];
      for (int q = 1; q <= 4; ++q) {
        const Vec2 p = a + (b - a) * (q / 5.0);
        CHECK(std::abs(eval_vector(V, u, t0, p).dot(n) -
                       eval_vector(V, u, t1, p).dot(n)) < 1e-11);
      }
    }
  }

  const auto W = build_space(am, Family::Lagrange, 2);
  std::vector<double> w(W.ndofs);
  for (double& c : w) c = coeff(rng);
  for (int e : am.active_edges) {
    const int t0 = bg.edge_tris[e][0], t1 = bg.edge_tris[e][1];
    const Vec2 a = bg.vertices[bg.edges[e][0]], b = bg.vertices[bg.edges[e][1]];
    for (int q = 1; q <= 4; ++q) {
      const Vec2 p = a + (b - a) * (q / 5.0);
      CHECK(std::abs(eval_scalar(W, w, t0, p) - eval_scalar(W, w, t1, p)) <
            1e-11);
    }
  }
}

TEST_CASE("discrete sequence: curl of Lagrange fields lies in RT") {
  const auto bg =
      build_background({0, 0, 1, 1}, 6, 6, DiagonalPattern::Alternating);
  const auto am = classify(bg, LevelSetDomain::disk({0.5, 0.5}, 0.4, bg.bbox), 1.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  for (const auto& [wdeg, vdeg] : {std::pair{1, 0}, std::pair{2, 1}}) {
    const auto W = build_space(am, Family::Lagrange, wdeg);
    const auto V = build_space(am, Family::RaviartThomas, vdeg);
    std::vector<double> w(W.ndofs);
    for (double& c : w) c = coeff(rng);

    // curl w is single-valued in its normal component, so interpolating the
    // piecewise evaluation through a point locator is well defined.
    const auto field = std::function<Vec2(Vec2)>([&](Vec2 p) {
      const int t = locate(am, p);
      REQUIRE(t >= 0);
      return eval_curl_scalar(W, w, t, p);
    });
    const auto v = interpolate(V, field);
    for (int t : am.active_elems)
      for (const Vec2 p : interior_points(bg, t))
        CHECK((eval_vector(V, v, t, p) - eval_curl_scalar(W, w, t, p)).norm() <
              1e-11);
  }
}

TEST_CASE("divergences have the partner polynomial degree") {
  const auto bg =
      build_background({0, 0, 1, 1}, 4, 4, DiagonalPattern::Uniform);
  const auto am = classify(bg, LevelSetDomain::all_inside(bg.bbox), 1.0);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  // BDM1 and RT0: divergence constant per element (k-hat = 0).
  for (const auto& [family, degree] :
       {std::pair{Family::BrezziDouglasMarini, 1},
        std::pair{Family::RaviartThomas, 0}}) {
    const auto V = build_space(am, family, degree);
    std::vector<double> u(V.ndofs);
    for (double& c : u) c = coeff(rng);
    for (int t : am.active_elems) {
      const auto pts = interior_points(bg, t);
      for (const Vec2 p : pts)
        CHECK(eval_div(V, u, t, p) ==
              doctest::Approx(eval_div(V, u, t, pts[0])).epsilon(1e-12));
    }
  }

  // RT1: divergence affine per element (k-hat = 1).
  const auto V = build_space(am, Family::RaviartThomas, 1);
  std::vector<double> u(V.ndofs);
  for (double& c : u) c = coeff(rng);
  for (int t : am.active_elems) {
    const auto c = bg.tri_coords(t);
    const double dc = eval_div(V, u, t, (c[0] + c[1] + c[2]) / 3.0);
    const double dv = (eval_div(V, u, t, c[0]) + eval_div(V, u, t, c[1]) +
                       eval_div(V, u, t, c[2])) /
                      3.0;
    CHECK(dc == doctest::Approx(dv).epsilon(1e-12));
  }
}

TEST_CASE("edge dof ranges and functional values for boundary data") {
  const auto bg =
      build_background({0, 0, 1, 1}, 2, 2, DiagonalPattern::Uniform);
  const auto am = classify(bg, LevelSetDomain::all_inside(bg.bbox), 1.0);
  const auto V = build_space(am, Family::BrezziDouglasMarini, 1);

  const auto g = std::function<Vec2(Vec2)>(
      [](Vec2 p) { return Vec2{p.x * p.y, p.x - p.y * p.y}; });
  for (const auto& f : am.boundary_facets()) {
    const auto [start, count] = V.edge_dof_range(f.edge);
    REQUIRE(count == 2);
    const Vec2 a = bg.vertices[bg.edges[f.edge][0]];
    const Vec2 b = bg.vertices[bg.edges[f.edge][1]];
    const Vec2 n = bg.edge_normal(f.edge);
    const double len = bg.edge_length(f.edge);
    // Independent quadrature oracle for the two edge moments.
    const auto rule = segment_quadrature(a, b, 12);
    double m0 = 0, m1 = 0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double gn = g(rule.points[q]).dot(n);
      const double s = (rule.points[q] - a).norm();
      m0 += rule.weights[q] * gn;
      m1 += rule.weights[q] * gn * (2 * s / len - 1);
    }
    CHECK(dof_value(V, start, g) == doctest::Approx(m0).epsilon(1e-12));
    CHECK(dof_value(V, start + 1, g) == doctest::Approx(m1).epsilon(1e-12));
  }
}

TEST_CASE("Poly2 directional derivatives are exact") {
  Poly2 p;
  p.origin = {0.3, -0.2};
  p.scale = 0.7;
  p.c = {0.5, -1.2, 2.0, 0.8, -0.6, 1.1};
  const Vec2 n = Vec2{3, -4}.normalized();
  const Vec2 x{1.1, 0.4};

  // Analytic derivatives through the chain rule with s = scale.
  const double s = p.scale;
  const double xi = (x.x - p.origin.x) / s, eta = (x.y - p.origin.y) / s;
  const Vec2 grad{(p.c[1] + 2 * p.c[3] * xi + p.c[4] * eta) / s,
                  (p.c[2] + p.c[4] * xi + 2 * p.c[5] * eta) / s};
  const double hnn = (2 * p.c[3] * n.x * n.x + 2 * p.c[4] * n.x * n.y +
                      2 * p.c[5] * n.y * n.y) /
                     (s * s);
  CHECK(p.dderiv(x, n, 0) == doctest::Approx(p.value(x)).epsilon(1e-14));
  CHECK(p.dderiv(x, n, 1) == doctest::Approx(grad.dot(n)).epsilon(1e-14));
  CHECK(p.dderiv(x, n, 2) == doctest::Approx(hnn).epsilon(1e-14));
  CHECK(p.dderiv(x, n, 3) == 0.0);

  // Cross-check j=1, j=2 with central differences along n.
  const double h = 1e-5;
  const auto at = [&](double t) { return p.value(x + n * t); };
  CHECK(p.dderiv(x, n, 1) ==
        doctest::Approx((at(h) - at(-h)) / (2 * h)).epsilon(1e-8));
  CHECK(p.dderiv(x, n, 2) ==
        doctest::Approx((at(h) - 2 * at(0) + at(-h)) / (h * h)).epsilon(1e-5));
}
