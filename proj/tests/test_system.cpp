// System-level tests: solver and condition-estimator oracles, preset data
// consistency, assembly structure, and exact reproduction of in-space
// solutions.
//
// The reproduction suite is the convention lock for the whole assembly: a
// divergence-free field that lies in every velocity space (with zero
// vorticity) must be recovered to solver precision by all methods, variants,
// and boundary modes, on a mesh that has both an unfitted interface and
// fitted facets.  Any sign or placement mistake in a boundary, coupling, or
// data term breaks the recovery.  Solver oracles are independent dense
// computations; preset data is validated against the strong equations by
// finite differences.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "cutstokes/presets.hpp"
#include "cutstokes/system.hpp"

using namespace cutstokes;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Wrap a plain dense matrix as an unstructured SparseSystem.
SparseSystem tiny_system(const std::vector<std::vector<double>>& M,
                         const std::vector<double>& b) {
  SparseSystem sys;
  const int n = static_cast<int>(M.size());
  sys.A = CooMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (M[i][j] != 0.0) sys.A.add(i, j, M[i][j]);
  sys.rhs = b;
  sys.layout.u = 0;
  sys.layout.n_u = n;
  sys.layout.dim = n;
  return sys;
}

/// Dense 1-norm condition number via Gauss-Jordan inversion (oracle).
double dense_cond1(std::vector<std::vector<double>> M) {
  const int n = static_cast<int>(M.size());
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  double norm_a = 0;
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::abs(M[i][j]);
    norm_a = std::max(norm_a, s);
  }
  for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
    std::swap(M[c], M[piv]);
    std::swap(inv[c], inv[piv]);
    REQUIRE(std::abs(M[c][c]) > 1e-14);
    const double d = M[c][c];
    for (int j = 0; j < n; ++j) {
      M[c][j] /= d;
      inv[c][j] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = M[r][c];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        M[r][j] -= f * M[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  double norm_i = 0;
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::abs(inv[i][j]);
    norm_i = std::max(norm_i, s);
  }
  return norm_a * norm_i;
}

ActiveMesh strip_mesh(int nx, double offset = 0.53) {
  const std::array<double, 4> box{0, 0, 1, 1};
  auto bg = build_background(box, nx, nx, DiagonalPattern::Alternating);
  return classify(std::move(bg), LevelSetDomain::halfplane(0, offset, box),
                  1.0);
}

ActiveMesh preset_mesh(const Preset& ps, int nx, double delta = 1.0) {
  return classify(preset_background(ps, nx), ps.domain, delta);
}

// Finite-difference probes of analytic fields.
Vec2 fd_gradient(const ScalarField& f, Vec2 p, double d = 1e-5) {
  return {(f({p.x + d, p.y}) - f({p.x - d, p.y})) / (2 * d),
          (f({p.x, p.y + d}) - f({p.x, p.y - d})) / (2 * d)};
}
double fd_laplacian(const ScalarField& f, Vec2 p, double d = 1e-4) {
  return (f({p.x + d, p.y}) + f({p.x - d, p.y}) + f({p.x, p.y + d}) +
          f({p.x, p.y - d}) - 4 * f(p)) /
         (d * d);
}

/// Constant-plus-rotation field (y + a, x + b): divergence-free with zero
/// rotation, contained in RT1 and BDM1; vorticity-space partner is 0.  Not
/// in RT0 (whose elementwise fields are (a + cx, b + cy)), so the RT0
/// configurations reproduce a constant field instead.
VectorField shear_field(double a, double b) {
  return [=](Vec2 p) { return Vec2{p.y + a, p.x + b}; };
}
VectorField constant_field(double a, double b) {
  return [=](Vec2) { return Vec2{a, b}; };
}

struct Reproduction {
  SolutionFields fields;
  AssembledSystem asmb;
};

/// Solve cfg on the strip mesh with exact data u = shear, p = p_const and
/// check that the discrete solution is the interpolant (to solver accuracy).
Reproduction check_reproduction(MethodConfig cfg, double mu, double coriolis,
                                double p_const) {
  const auto am = strip_mesh(6);
  const auto u_ex = cfg.velocity_degree == 0 ? constant_field(0.3, 0.7)
                                             : shear_field(0.3, 0.7);

  ProblemData data;
  data.mu = mu;
  data.coriolis = coriolis;
  data.g = u_ex;
  // -mu lap u + 2 Lambda u_perp + grad p = f with lap u = 0, p constant.
  data.f = [=](Vec2 p) {
    const Vec2 u = u_ex(p);
    return Vec2{-2 * coriolis * u.y, 2 * coriolis * u.x};
  };
  data.p0 = [=](Vec2) { return p_const; };

  auto asmb = assemble(cfg, am, data);
  auto fields = solve(asmb.sys);
  CHECK(fields.residual <= 1e-10);

  const auto u_ref = interpolate(asmb.V, u_ex);
  CHECK(max_diff(fields.u, u_ref) <= 2e-7);
  for (double pi : fields.p) CHECK(std::abs(pi - p_const) <= 2e-7);
  if (asmb.W) CHECK(max_abs(fields.omega) <= 2e-7);
  if (asmb.M) CHECK(max_abs(fields.xi) <= 2e-7);
  CHECK(std::abs(fields.alpha) <= 1e-8);
  CHECK(std::abs(fields.beta) <= 1e-8);

  const auto div = check_divergence(asmb.V, fields.u);
  CHECK(div.linf <= 1e-9);
  return {std::move(fields), std::move(asmb)};
}

double interface_flux(const AssembledSystem& asmb,
                      const std::vector<double>& u) {
  double total = 0;
  for (int t : asmb.am->cut_elems) {
    const auto ir = interface_rule(*asmb.am, t, 6);
    for (std::size_t q = 0; q < ir.rule.points.size(); ++q)
      total += ir.rule.weights[q] *
               eval_vector(asmb.V, u, t, ir.rule.points[q]).dot(ir.normal);
  }
  return total;
}

}  // namespace

TEST_CASE("solve: dense oracles on tiny systems") {
  // Saddle point [[1,1],[1,0]] x = (2,1) has the unique solution (1,1).
  auto sys = tiny_system({{1, 1}, {1, 0}}, {2, 1});
  auto sol = solve(sys);
  CHECK(std::abs(sol.u[0] - 1.0) <= 1e-13);
  CHECK(std::abs(sol.u[1] - 1.0) <= 1e-13);
  CHECK(sol.residual <= 1e-14);

  // Identity returns the right-hand side exactly.
  std::vector<std::vector<double>> eye(5, std::vector<double>(5, 0.0));
  std::vector<double> b(5);
  for (int i = 0; i < 5; ++i) {
    eye[i][i] = 1.0;
    b[i] = 0.5 * i - 1.0;
  }
  auto id = solve(tiny_system(eye, b));
  CHECK(max_diff(id.u, b) == 0.0);

  // Rank-deficient matrices are reported, not silently solved.
  CHECK_THROWS_AS(solve(tiny_system({{1, 1}, {1, 1}}, {1, 1})),
                  SingularSystemError);
}

TEST_CASE("estimate_cond1: identity, diagonal, and dense-inverse oracles") {
  std::vector<std::vector<double>> eye(7, std::vector<double>(7, 0.0));
  for (int i = 0; i < 7; ++i) eye[i][i] = 1.0;
  CHECK(std::abs(estimate_cond1(tiny_system(eye, std::vector<double>(7))) -
                 1.0) <= 1e-12);

  std::vector<std::vector<double>> diag(10, std::vector<double>(10, 0.0));
  for (int i = 0; i < 10; ++i) diag[i][i] = i + 1.0;
  CHECK(std::abs(estimate_cond1(tiny_system(diag, std::vector<double>(10))) -
                 10.0) <= 1e-11);

  // Random diagonally dominant matrix: the Hager estimate is a lower bound
  // and should land within a small factor of the exact kappa_1.
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 40;
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M[i][j] = 0.4 * unif(rng);
    M[i][i] = 3.0 + unif(rng);
  }
  const double exact = dense_cond1(M);
  const double est = estimate_cond1(tiny_system(M, std::vector<double>(n)));
  CHECK(est <= exact * (1.0 + 1e-9));
  CHECK(est >= 0.1 * exact);

  // Deterministic: repeated calls agree bitwise.
  CHECK(est == estimate_cond1(tiny_system(M, std::vector<double>(n))));
}

TEST_CASE("presets: data satisfies the strong equations") {
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> unif(0.25, 0.75);

  for (const Vec2 shift : {Vec2{0, 0}, Vec2{0.031, -0.024}}) {
    const auto ps = preset_ex1(shift);
    REQUIRE(ps.exact.known);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec2 p{unif(rng), unif(rng)};
      if (ps.domain(p) > -0.05) continue;  // keep FD stencils inside
      const Vec2 u = ps.exact.u(p);
      // Momentum: f = -mu lap u + grad p.
      const double lap1 =
          fd_laplacian([&](Vec2 q) { return ps.exact.u(q).x; }, p);
      const double lap2 =
          fd_laplacian([&](Vec2 q) { return ps.exact.u(q).y; }, p);
      const Vec2 gp = fd_gradient(ps.exact.p, p);
      const Vec2 f = ps.data.f(p);
      CHECK(std::abs(f.x - (-ps.data.mu * lap1 + gp.x)) <= 2e-5 * (1 + std::abs(f.x)));
      CHECK(std::abs(f.y - (-ps.data.mu * lap2 + gp.y)) <= 2e-5 * (1 + std::abs(f.y)));
      // Divergence-free and gradient consistency.
      const Mat2 g = ps.exact.grad_u(p);
      CHECK(std::abs(g.a11 + g.a22) <= 1e-13);
      const Vec2 g1 = fd_gradient([&](Vec2 q) { return ps.exact.u(q).x; }, p);
      const Vec2 g2 = fd_gradient([&](Vec2 q) { return ps.exact.u(q).y; }, p);
      CHECK(std::abs(g.a11 - g1.x) <= 1e-8 * (1 + std::abs(g.a11)));
      CHECK(std::abs(g.a12 - g1.y) <= 1e-8 * (1 + std::abs(g.a12)));
      CHECK(std::abs(g.a21 - g2.x) <= 1e-8 * (1 + std::abs(g.a21)));
      CHECK(std::abs(g.a22 - g2.y) <= 1e-8 * (1 + std::abs(g.a22)));
      // Vorticity field is mu (d2 u1 - d1 u2).
      CHECK(std::abs(ps.exact.vorticity(p) - ps.data.mu * (g.a12 - g.a21)) <=
            1e-10 * (1 + std::abs(ps.exact.vorticity(p))));
      (void)u;
    }
    // No-slip on the (shifted) circle.
    for (int s = 0; s < 8; ++s) {
      const double th = 0.7853981633974483 * s;
      const Vec2 c{0.5 + shift.x, 0.5 + shift.y};
      const Vec2 q{c.x + 0.5 * std::cos(th), c.y + 0.5 * std::sin(th)};
      CHECK(std::abs(ps.exact.u(q).x) <= 1e-12);
      CHECK(std::abs(ps.exact.u(q).y) <= 1e-12);
    }
  }

  // Alternative-condition twin shares the solution and exposes p0 = p.
  const auto alt = preset_ex1_altbc();
  const Vec2 probe{0.4, 0.6};
  CHECK(alt.data.p0(probe) == preset_ex1().exact.p(probe));

  // Channel: inflow and outflow fluxes balance (Gauss on the two segments).
  const auto ex2 = preset_ex2(2000.0);
  std::vector<double> gn, gw;
  gauss_legendre_01(8, gn, gw);
  double in = 0, out = 0;
  for (std::size_t q = 0; q < gn.size(); ++q) {
    in += 2.0 * gw[q] * ex2.data.g({0.0, 2.0 * gn[q]}).x;
    out += 1.0 * gw[q] * ex2.data.g({4.0, 1.0 + gn[q]}).x;
  }
  CHECK(std::abs(in - out) <= 1e-12);
  CHECK(ex2.data.g({1.7, 0.0}).x == 0.0);  // no-slip wall
  CHECK(ex2.data.mu == 0.01);
  CHECK(ex2.data.coriolis == 2000.0);

  // Strip: u = 0, f = grad p, and p has zero mean over the unit square.
  const auto ex3 = preset_ex3(1e4);
  double pmean = 0;
  for (std::size_t q = 0; q < gn.size(); ++q)
    pmean += gw[q] * ex3.exact.p({0.3, gn[q]});
  CHECK(std::abs(pmean) <= 1e-11 * 1e4);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec2 p{unif(rng), 0.9 * unif(rng)};
    const Vec2 gp = fd_gradient(ex3.exact.p, p);
    CHECK(std::abs(ex3.data.f(p).x - gp.x) <= 1e-4);
    CHECK(std::abs(ex3.data.f(p).y - gp.y) <= 2e-4 * (1 + std::abs(gp.y)));
    CHECK(ex3.exact.u(p).x == 0.0);
    CHECK(ex3.exact.vorticity(p) == 0.0);
  }
  CHECK(preset_ex3(1e4, true).lambda_u == 1e5 * 1e4);
  CHECK(preset_ex3(1e4, false).lambda_u == 1e5);
}

TEST_CASE("assemble: layout, borders, and validation") {
  const auto ps = preset_ex1();
  const auto am = preset_mesh(ps, 8);

  MethodConfig nc;
  nc.method = Method::NC;
  const auto a_nc = assemble(nc, am, ps.data);
  CHECK(a_nc.sys.layout.u == 0);
  CHECK(a_nc.sys.layout.p == a_nc.V.ndofs);
  CHECK(a_nc.sys.layout.beta == a_nc.V.ndofs + a_nc.Q.ndofs);
  CHECK(a_nc.sys.layout.alpha == a_nc.V.ndofs + a_nc.Q.ndofs + 1);
  CHECK(a_nc.sys.layout.dim == a_nc.V.ndofs + a_nc.Q.ndofs + 2);
  CHECK(static_cast<int>(a_nc.sys.rhs.size()) == a_nc.sys.layout.dim);
  CHECK_FALSE(a_nc.sys.symmetric);
  // Flux-compatibility data: the disk data vanishes on the boundary.
  CHECK(std::abs(a_nc.sys.rhs[a_nc.sys.layout.beta]) <= 1e-14);
  // The mean row carries the element measures: its sum is |Omega_h|.
  double mean_row = 0, area = 0;
  for (std::size_t k = 0; k < a_nc.sys.A.nnz(); ++k)
    if (a_nc.sys.A.row[k] == a_nc.sys.layout.alpha) mean_row += a_nc.sys.A.val[k];
  for (int t : am.active_elems) area += am.inside_area[t];
  CHECK(std::abs(mean_row - area) <= 1e-12);

  MethodConfig c1;
  c1.method = Method::C1;
  c1.velocity_family = Family::RaviartThomas;
  c1.velocity_degree = 1;
  const auto a_c1 = assemble(c1, am, ps.data);
  CHECK(a_c1.sys.layout.omega == 0);
  CHECK(a_c1.sys.layout.u == a_c1.W->ndofs);
  CHECK(a_c1.sys.layout.dim ==
        a_c1.W->ndofs + a_c1.V.ndofs + a_c1.Q.ndofs + 2);

  MethodConfig c2;
  c2.method = Method::C2;
  c2.velocity_family = Family::RaviartThomas;
  c2.velocity_degree = 0;
  const auto a_c2 = assemble(c2, am, ps.data);
  CHECK(a_c2.sys.layout.xi == a_c2.W->ndofs + a_c2.V.ndofs + a_c2.Q.ndofs);
  CHECK(a_c2.sys.layout.beta == -1);
  CHECK(a_c2.sys.layout.dim == a_c2.W->ndofs + a_c2.V.ndofs + a_c2.Q.ndofs +
                                   a_c2.M->ndofs + 1);
  CHECK(a_c2.sys.symmetric);

  // Variant borders: standard drops the flux row, modification 1 keeps the
  // mean row only, modification 2 restores both.
  MethodConfig v = nc;
  v.variant = Variant::Standard;
  CHECK(assemble(v, am, ps.data).sys.layout.beta == -1);
  v.variant = Variant::Modification1;
  CHECK(assemble(v, am, ps.data).sys.layout.beta == -1);
  CHECK(assemble(v, am, ps.data).sys.layout.alpha >= 0);
  v.variant = Variant::Modification2;
  CHECK(assemble(v, am, ps.data).sys.layout.beta >= 0);

  // Penalty defaults travel from the preset into the configuration.
  MethodConfig folded = apply_preset_penalties(MethodConfig{}, preset_ex2(0));
  CHECK(folded.lambda_t == 1.0);
  CHECK(folded.lambda_un == 400.0);
  CHECK(folded.split_penalty);

  // Invalid combinations.
  MethodConfig bad = c1;
  bad.velocity_family = Family::BrezziDouglasMarini;
  CHECK_THROWS_AS(assemble(bad, am, ps.data), IncompatibleSpacesError);
  bad = c2;
  bad.variant = Variant::Modification1;
  CHECK_THROWS_AS(assemble(bad, am, ps.data), IncompatibleSpacesError);
  bad = c2;
  bad.multiplier_degree = 2;
  CHECK_THROWS_AS(assemble(bad, am, ps.data), IncompatibleSpacesError);
  bad = nc;
  bad.velocity_family = Family::Lagrange;
  CHECK_THROWS_AS(assemble(bad, am, ps.data), IncompatibleSpacesError);
  bad = nc;
  bad.bc = BcMode::Alternative;
  CHECK_THROWS_AS(assemble(bad, am, ps.data), IncompatibleSpacesError);

  // C2 needs a cut boundary.
  const std::array<double, 4> box{0, 0, 1, 1};
  auto fitted = classify(build_background(box, 4, 4, DiagonalPattern::Uniform),
                         LevelSetDomain::all_inside(box), 1.0);
  CHECK_THROWS_AS(assemble(c2, fitted, ps.data), EmptyCutBoundaryError);
}

TEST_CASE("exact reproduction of in-space solutions across all methods") {
  // NC family; the first carries a Coriolis term and macro-patch flavor to
  // cover those paths end to end.
  MethodConfig nc;
  nc.method = Method::NC;
  nc.stab.flavor = StabFlavor::MacroPatch;
  check_reproduction(nc, 1.0, 5.0, 0.0);

  nc = MethodConfig{};
  nc.method = Method::NC;
  for (Variant v : {Variant::Proposed, Variant::Standard,
                    Variant::Modification1, Variant::Modification2}) {
    nc.variant = v;
    check_reproduction(nc, 0.9, 0.0, 0.0);
  }
  nc.variant = Variant::Proposed;
  nc.velocity_family = Family::RaviartThomas;
  nc.velocity_degree = 1;
  check_reproduction(nc, 1.0, 0.0, 0.0);
  nc.velocity_degree = 0;
  nc.split_penalty = true;
  nc.lambda_t = 3.0;
  nc.lambda_un = 900.0;
  check_reproduction(nc, 1.0, 0.0, 0.0);

  // C1: the vorticity row locks the boundary-term sign of the curl identity.
  MethodConfig c1;
  c1.method = Method::C1;
  c1.velocity_family = Family::RaviartThomas;
  c1.velocity_degree = 0;
  c1.lambda_un = 600.0;
  check_reproduction(c1, 0.8, 0.0, 0.0);
  c1.velocity_degree = 1;
  check_reproduction(c1, 1.0, 4.0, 0.0);
  c1.velocity_degree = 0;
  c1.variant = Variant::Standard;
  check_reproduction(c1, 1.0, 0.0, 0.0);

  // Alternative boundary conditions: the pressure data fixes the constant.
  MethodConfig alt = c1;
  alt.variant = Variant::Proposed;
  alt.bc = BcMode::Alternative;
  alt.stab.tau_m = 0.0;  // the (0, tau_c, 0) choice
  alt.stab.tau_a = 0.0;
  check_reproduction(alt, 1.0, 0.0, 2.5);

  // C2 with both multiplier degrees, scaling, and the standard variant.
  MethodConfig c2;
  c2.method = Method::C2;
  c2.velocity_family = Family::RaviartThomas;
  c2.velocity_degree = 0;
  auto rep = check_reproduction(c2, 1.0, 0.0, 0.0);
  CHECK(rep.asmb.sys.symmetric == false);  // strong rows on fitted facets
  c2.multiplier_degree = 1;
  c2.multiplier_scale = 7.0;
  check_reproduction(c2, 0.7, 0.0, 0.0);
  c2.velocity_degree = 1;
  c2.multiplier_degree = 1;
  check_reproduction(c2, 1.0, 0.0, 0.0);
  c2.velocity_degree = 0;
  c2.multiplier_degree = 0;
  c2.variant = Variant::Standard;
  check_reproduction(c2, 1.0, 0.0, 0.0);
}

TEST_CASE("proposed methods are exactly divergence-free on the disk") {
  const auto ps = preset_ex1();
  const auto am = preset_mesh(ps, 10);

  auto run = [&](MethodConfig cfg) {
    cfg = apply_preset_penalties(cfg, ps);
    auto asmb = assemble(cfg, am, ps.data);
    auto fields = solve(asmb.sys);
    CHECK(fields.residual <= 1e-10);
    const auto div = check_divergence(asmb.V, fields.u);
    CHECK(div.linf <= 1e-10);
    CHECK(std::abs(fields.alpha) <= 1e-9);
    // The mean row pins the pressure average.
    double pint = 0;
    for (int t : am.active_elems) {
      const auto rule = element_inside_rule(am, t, 3);
      for (std::size_t q = 0; q < rule.points.size(); ++q)
        pint +=
            rule.weights[q] * eval_scalar(asmb.Q, fields.p, t, rule.points[q]);
    }
    CHECK(std::abs(pint) <= 1e-8 * (1 + max_abs(fields.p)));
    return std::make_pair(std::move(asmb), std::move(fields));
  };

  MethodConfig nc;
  nc.method = Method::NC;
  run(nc);

  MethodConfig c1;
  c1.method = Method::C1;
  c1.velocity_family = Family::RaviartThomas;
  c1.velocity_degree = 1;
  run(c1);

  MethodConfig c2;
  c2.method = Method::C2;
  c2.velocity_family = Family::RaviartThomas;
  c2.velocity_degree = 0;
  auto [asmb, fields] = run(c2);
  // Testing the multiplier row with chi = 1 forces the discrete flux to
  // match the data flux exactly (s_xi annihilates constants).
  CHECK(std::abs(interface_flux(asmb, fields.u)) <= 1e-9);
}

TEST_CASE("modifications: divergence defect structure") {
  const auto ps = preset_ex1();
  const auto am = preset_mesh(ps, 10);

  MethodConfig cfg;
  cfg.method = Method::NC;
  cfg.lambda_u = 800.0;

  cfg.variant = Variant::Modification1;
  auto a1 = assemble(cfg, am, ps.data);
  auto f1 = solve(a1.sys);
  auto d1 = check_divergence(a1.V, f1.u, f1.alpha);
  CHECK(d1.linf_defect <= 1e-10);     // div u_h = -alpha pointwise
  CHECK(d1.linf >= 1e-6);             // but not zero
  CHECK(std::abs(f1.alpha) >= 1e-6);  // alpha carries the defect
  CHECK(std::abs(d1.linf - std::abs(f1.alpha)) <= 1e-10);

  cfg.variant = Variant::Modification2;
  auto a2 = assemble(cfg, am, ps.data);
  auto f2 = solve(a2.sys);
  auto d2 = check_divergence(a2.V, f2.u);
  CHECK(d2.linf >= 1e-8);

  cfg.variant = Variant::Proposed;
  auto a0 = assemble(cfg, am, ps.data);
  auto f0 = solve(a0.sys);
  CHECK(check_divergence(a0.V, f0.u).linf <= 1e-10);
}

TEST_CASE("solve is deterministic and stable under triplet permutation") {
  const auto ps = preset_ex1();
  const auto am = preset_mesh(ps, 8);
  MethodConfig cfg;
  cfg.method = Method::NC;
  auto asmb = assemble(cfg, am, ps.data);
  const auto base = solve(asmb.sys);

  // Same assembly, same bits.
  auto again = solve(assemble(cfg, am, ps.data).sys);
  CHECK(max_diff(base.raw, again.raw) == 0.0);

  // Permuted triplet order changes only roundoff.
  auto shuffled = asmb.sys;
  std::vector<std::size_t> perm(shuffled.A.nnz());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937(2024));
  CooMatrix B(shuffled.A.rows, shuffled.A.cols);
  for (std::size_t k : perm)
    B.add(shuffled.A.row[k], shuffled.A.col[k], shuffled.A.val[k]);
  shuffled.A = std::move(B);
  const auto permuted = solve(shuffled);
  CHECK(max_diff(base.raw, permuted.raw) <= 1e-9 * (1 + max_abs(base.raw)));
}

TEST_CASE("matrix market export round trip") {
  CooMatrix A(3, 4);
  A.add(0, 0, 1.5);
  A.add(2, 3, -2.25);
  A.add(0, 0, 0.5);  // duplicate, must be merged
  A.add(1, 2, 1e-30);
  const std::string path = "mm_roundtrip.mtx";
  write_matrix_market(A, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.find("MatrixMarket") != std::string::npos);
  int rows = 0, cols = 0, nnz = 0;
  in >> rows >> cols >> nnz;
  CHECK(rows == 3);
  CHECK(cols == 4);
  CHECK(nnz == 3);
  std::vector<std::vector<double>> M(rows, std::vector<double>(cols, 0.0));
  for (int k = 0; k < nnz; ++k) {
    int i = 0, j = 0;
    double v = 0;
    in >> i >> j >> v;
    M[i - 1][j - 1] = v;
  }
  CHECK(M[0][0] == 2.0);
  CHECK(M[2][3] == -2.25);
  CHECK(M[1][2] == 1e-30);
}
