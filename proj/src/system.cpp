#include "cutstokes/system.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <utility>
#include <vector>

namespace cutstokes {

namespace {

bool uses_pressure_jump(Variant v) {
  return v == Variant::Standard || v == Variant::Modification2;
}
bool has_flux_border(Variant v) {
  return v == Variant::Proposed || v == Variant::Modification2;
}

struct Taus {
  double a = 0, b = 0, m = 0, c = 0, p = 0, xi = 0;
};

Taus effective_taus(const MethodConfig& cfg) {
  if (!cfg.stab.enabled) return {};
  Taus t;
  t.a = cfg.stab.tau_a;
  t.m = cfg.stab.tau_m;
  t.c = cfg.stab.tau_c;
  t.xi = cfg.stab.tau_xi;
  if (uses_pressure_jump(cfg.variant))
    t.p = cfg.stab.tau_p;
  else
    t.b = cfg.stab.tau_b;
  return t;
}

int multiplier_degree(const MethodConfig& cfg) {
  return cfg.multiplier_degree < 0 ? cfg.velocity_degree
                                   : cfg.multiplier_degree;
}

void validate(const MethodConfig& cfg, const ActiveMesh& am) {
  if (cfg.velocity_family != Family::RaviartThomas &&
      cfg.velocity_family != Family::BrezziDouglasMarini)
    throw IncompatibleSpacesError("velocity space must be H(div)-conforming");
  if (cfg.method != Method::NC &&
      cfg.velocity_family != Family::RaviartThomas)
    throw IncompatibleSpacesError(
        "vorticity methods need Raviart-Thomas velocities");
  if (cfg.bc == BcMode::Alternative) {
    if (cfg.method != Method::C1)
      throw IncompatibleSpacesError(
          "alternative boundary conditions are a C1 mode");
    if (cfg.variant != Variant::Proposed)
      throw IncompatibleSpacesError(
          "alternative boundary conditions have no variant selection");
  }
  if (cfg.method == Method::C2) {
    if (cfg.variant != Variant::Proposed && cfg.variant != Variant::Standard)
      throw IncompatibleSpacesError(
          "C2 supports the proposed and standard variants only");
    const int kt = multiplier_degree(cfg);
    if (kt != cfg.velocity_degree && kt != cfg.velocity_degree + 1)
      throw IncompatibleSpacesError("multiplier degree must be k or k+1");
    if (kt > 1)
      throw IncompatibleSpacesError(
          "multiplier degree above 1 is not supported");
    if (am.cut_elems.empty())
      throw EmptyCutBoundaryError(
          "C2 needs cut elements to host its multiplier space");
  }
}

/// Everything the per-method assembly routines share.
struct AsmCtx {
  const MethodConfig* cfg;
  const ActiveMesh* am;
  const ProblemData* data;
  const FeSpace* W;
  const FeSpace* V;
  const FeSpace* Q;
  const FeSpace* M;
  BlockLayout L;
  Taus tau;
  double gamma;                    ///< s_a exponent sign
  const std::vector<int>* edges;   ///< stabilization edge set
  StabFlavor flavor;
  CooMatrix* A;
  std::vector<double>* rhs;
};

NitschePenalty penalty_of(const MethodConfig& cfg) {
  return {cfg.lambda_u, cfg.split_penalty, cfg.lambda_t, cfg.lambda_un};
}

void assemble_nc(AsmCtx& c) {
  CooMatrix& A = *c.A;
  std::vector<double>& rhs = *c.rhs;
  const FeSpace& V = *c.V;
  const FeSpace& Q = *c.Q;
  const int u0 = c.L.u, p0 = c.L.p;
  const double mu = c.data->mu;
  const NitschePenalty pen = penalty_of(*c.cfg);

  // Velocity operator: viscous volume term, tangential interior penalty,
  // Nitsche terms on the interface, their fitted-facet counterparts, s_a.
  // Kernels whose first argument is the trial function are placed transposed
  // (rows are the momentum test functions).
  add_viscous(block(A, u0, u0), V, mu);
  add_tangential_ip(block_t(A, u0, u0), V, mu, c.cfg->lambda_t);
  add_nitsche(block_t(A, u0, u0), V, mu, pen);
  add_fitted_tangential(block_t(A, u0, u0), V, mu, pen);
  if (c.tau.a != 0)
    add_stab_velocity(block(A, u0, u0), V, c.tau.a, c.gamma, *c.edges,
                      c.flavor);
  if (c.data->coriolis != 0)
    add_coriolis(block_t(A, u0, u0), V, c.data->coriolis);

  // Momentum-pressure coupling -B(v, p) = -b0 + interface - s_b.
  add_div_pressure(block(A, u0, p0, -1.0), V, Q);
  if (!c.cfg->lowest_order_b0)
    add_pressure_interface(block(A, u0, p0, 1.0), V, Q);
  if (c.tau.b != 0)
    add_stab_div_pressure(block(A, u0, p0, -1.0), V, Q, c.tau.b, *c.edges,
                          c.flavor);

  // Conservation row B0(u, q) (+ s_p on the pressure in the s_p variants).
  add_div_pressure(block_t(A, p0, u0, 1.0), V, Q);
  if (c.tau.b != 0)
    add_stab_div_pressure(block_t(A, p0, u0, 1.0), V, Q, c.tau.b, *c.edges,
                          c.flavor);
  if (c.tau.p != 0)
    add_stab_pressure(block(A, p0, p0, 1.0), Q, c.tau.p,
                      c.cfg->velocity_degree, *c.edges, c.flavor);

  add_load(slice(rhs, u0), V, c.data->f);
  add_nitsche_data(slice(rhs, u0), V, mu, pen, c.data->g);
  add_fitted_tangential_data(slice(rhs, u0), V, mu, pen, c.data->g);
}

void assemble_c1(AsmCtx& c) {
  CooMatrix& A = *c.A;
  std::vector<double>& rhs = *c.rhs;
  const FeSpace& W = *c.W;
  const FeSpace& V = *c.V;
  const FeSpace& Q = *c.Q;
  const int w0 = c.L.omega, u0 = c.L.u, p0 = c.L.p;
  const bool dirichlet = c.cfg->bc == BcMode::Dirichlet;

  // Vorticity row: m(omega, phi) - c(phi, u) = -(u . t data, phi).
  add_mass_scalar(block(A, w0, w0), W, 1.0 / c.data->mu);
  if (c.tau.m != 0)
    add_stab_vorticity(block(A, w0, w0), W, c.tau.m, *c.edges, c.flavor);
  add_curl_coupling(block(A, w0, u0, -1.0), W, V);
  if (c.tau.c != 0)
    add_stab_curl_velocity(block(A, w0, u0, -1.0), W, V, c.tau.c, *c.edges,
                           c.flavor);
  add_tangential_data_scalar(slice(rhs, w0, -1.0), W, c.data->g,
                             BoundaryParts::All);

  // Momentum row: c(omega, v) + penalty/stabilization - B(v, p).
  add_curl_coupling(block_t(A, u0, w0, 1.0), W, V);
  if (c.tau.c != 0)
    add_stab_curl_velocity(block_t(A, u0, w0, 1.0), W, V, c.tau.c, *c.edges,
                           c.flavor);
  if (dirichlet) add_normal_penalty(block(A, u0, u0), V, c.cfg->lambda_un);
  if (c.tau.a != 0)
    add_stab_velocity(block(A, u0, u0), V, c.tau.a, c.gamma, *c.edges,
                      c.flavor);
  if (c.data->coriolis != 0)
    add_coriolis(block_t(A, u0, u0), V, c.data->coriolis);
  add_div_pressure(block(A, u0, p0, -1.0), V, Q);
  if (dirichlet && !c.cfg->lowest_order_b0)
    add_pressure_interface(block(A, u0, p0, 1.0), V, Q);
  if (c.tau.b != 0)
    add_stab_div_pressure(block(A, u0, p0, -1.0), V, Q, c.tau.b, *c.edges,
                          c.flavor);
  add_load(slice(rhs, u0), V, c.data->f);
  if (dirichlet)
    add_normal_penalty_data(slice(rhs, u0), V, c.cfg->lambda_un, c.data->g);
  else
    add_normal_boundary_data(slice(rhs, u0, -1.0), V, c.data->p0,
                             BoundaryParts::All);

  // Conservation row.
  add_div_pressure(block_t(A, p0, u0, 1.0), V, Q);
  if (c.tau.b != 0)
    add_stab_div_pressure(block_t(A, p0, u0, 1.0), V, Q, c.tau.b, *c.edges,
                          c.flavor);
  if (c.tau.p != 0)
    add_stab_pressure(block(A, p0, p0, 1.0), Q, c.tau.p,
                      c.cfg->velocity_degree, *c.edges, c.flavor);
}

void assemble_c2(AsmCtx& c) {
  CooMatrix& A = *c.A;
  std::vector<double>& rhs = *c.rhs;
  const FeSpace& W = *c.W;
  const FeSpace& V = *c.V;
  const FeSpace& Q = *c.Q;
  const FeSpace& M = *c.M;
  const int w0 = c.L.omega, u0 = c.L.u, p0 = c.L.p, x0 = c.L.xi;
  const double ra = c.cfg->multiplier_scale;

  // Symmetric normalization: the vorticity, conservation, and mean rows are
  // negated, and the multiplier row and column are scaled by `ra`, so the
  // matrix is exactly symmetric for every stabilization choice.

  // Vorticity row: -m(omega, phi) + c(phi, u) = +(u . t data, phi).
  add_mass_scalar(block(A, w0, w0, -1.0), W, 1.0 / c.data->mu);
  if (c.tau.m != 0)
    add_stab_vorticity(block(A, w0, w0, -1.0), W, c.tau.m, *c.edges, c.flavor);
  add_curl_coupling(block(A, w0, u0, 1.0), W, V);
  if (c.tau.c != 0)
    add_stab_curl_velocity(block(A, w0, u0, 1.0), W, V, c.tau.c, *c.edges,
                           c.flavor);
  add_tangential_data_scalar(slice(rhs, w0, 1.0), W, c.data->g,
                             BoundaryParts::All);

  // Momentum row: c(omega, v) - B0(v, p) + ra (xi, v . n).
  add_curl_coupling(block_t(A, u0, w0, 1.0), W, V);
  if (c.tau.c != 0)
    add_stab_curl_velocity(block_t(A, u0, w0, 1.0), W, V, c.tau.c, *c.edges,
                           c.flavor);
  if (c.data->coriolis != 0)
    add_coriolis(block_t(A, u0, u0), V, c.data->coriolis);
  add_div_pressure(block(A, u0, p0, -1.0), V, Q);
  if (c.tau.b != 0)
    add_stab_div_pressure(block(A, u0, p0, -1.0), V, Q, c.tau.b, *c.edges,
                          c.flavor);
  add_multiplier_coupling(block_t(A, u0, x0, ra), M, V);
  add_load(slice(rhs, u0), V, c.data->f);

  // Conservation row, negated: -B0(u, q) (- s_p in the standard variant).
  add_div_pressure(block_t(A, p0, u0, -1.0), V, Q);
  if (c.tau.b != 0)
    add_stab_div_pressure(block_t(A, p0, u0, -1.0), V, Q, c.tau.b, *c.edges,
                          c.flavor);
  if (c.tau.p != 0)
    add_stab_pressure(block(A, p0, p0, -1.0), Q, c.tau.p,
                      c.cfg->velocity_degree, *c.edges, c.flavor);

  // Multiplier row: ra (u . n, chi) - ra^2 s_xi(xi, chi) = ra (g . n, chi).
  add_multiplier_coupling(block(A, x0, u0, ra), M, V);
  if (c.tau.xi != 0)
    add_stab_multiplier(block(A, x0, x0, -(ra * ra)), M, c.tau.xi,
                        c.am->cutcut_edges);
  add_multiplier_data(slice(rhs, x0, ra), M, c.data->g);
}

/// Flux and mean borders shared by all Dirichlet variants.
void add_borders(AsmCtx& c) {
  CooMatrix& A = *c.A;
  if (c.L.beta >= 0) {
    std::vector<double> zf(c.V->ndofs, 0.0);
    add_boundary_flux(slice(zf, 0), *c.V, BoundaryParts::All);
    for (int i = 0; i < c.V->ndofs; ++i) {
      if (zf[i] == 0.0) continue;
      A.add(c.L.u + i, c.L.beta, zf[i]);
      A.add(c.L.beta, c.L.u + i, zf[i]);
    }
    (*c.rhs)[c.L.beta] =
        boundary_flux_of_data(*c.am, c.data->g, BoundaryParts::All);
  }
  if (c.L.alpha >= 0) {
    std::vector<double> mp(c.Q->ndofs, 0.0);
    add_mean_value(slice(mp, 0), *c.Q);
    const double s = c.cfg->method == Method::C2 ? -1.0 : 1.0;
    for (int j = 0; j < c.Q->ndofs; ++j) {
      if (mp[j] == 0.0) continue;
      A.add(c.L.p + j, c.L.alpha, s * mp[j]);
      A.add(c.L.alpha, c.L.p + j, s * mp[j]);
    }
  }
}

/// Strong normal constraints on fitted facets: (velocity dof, value) pairs.
/// The dof functionals integrate over the full background edge, so the data
/// is evaluated through its analytic extension on clipped facets.  C2 skips
/// the facets of cut elements: there the multiplier enforces the normal
/// component together with the interface piece, which both preserves the
/// exact boundary-flux identity (test the multiplier row with the all-ones
/// function) and couples multiplier modes that vanish on the interface.
std::vector<std::pair<int, double>> strong_constraints(
    const MethodConfig& cfg, const ActiveMesh& am, const FeSpace& V,
    const ProblemData& data) {
  std::vector<std::pair<int, double>> out;
  if (cfg.bc != BcMode::Dirichlet) return out;
  for (const auto& facet : am.boundary_facets()) {
    const auto [d0, cnt] = V.edge_dof_range(facet.edge);
    for (int i = 0; i < cnt; ++i)
      out.emplace_back(d0 + i, dof_value(V, d0 + i, data.g));
  }
  return out;
}

/// Replace the rows of the fixed dofs by identity rows (columns are kept, so
/// the fixed values feed the remaining equations).
void apply_constraints(SparseSystem& sys,
                       const std::vector<std::pair<int, double>>& fixed) {
  if (fixed.empty()) return;
  std::vector<char> is_fixed(sys.layout.dim, 0);
  for (const auto& [dof, value] : fixed) is_fixed[sys.layout.u + dof] = 1;

  CooMatrix B(sys.A.rows, sys.A.cols);
  for (std::size_t k = 0; k < sys.A.nnz(); ++k)
    if (!is_fixed[sys.A.row[k]])
      B.add(sys.A.row[k], sys.A.col[k], sys.A.val[k]);
  for (const auto& [dof, value] : fixed) {
    const int r = sys.layout.u + dof;
    B.add(r, r, 1.0);
    sys.rhs[r] = value;
  }
  sys.A = std::move(B);
}

/// Triplets -> compressed Eigen matrix -> LU; shared by solve and condest.
struct Factorized {
  Eigen::SparseMatrix<double> A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

void factorize_into(const SparseSystem& sys, Factorized& f) {
  if (sys.A.rows != sys.A.cols ||
      sys.A.rows != static_cast<int>(sys.rhs.size()))
    throw SingularSystemError("system is not square");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sys.A.nnz());
  for (std::size_t k = 0; k < sys.A.nnz(); ++k)
    trips.emplace_back(sys.A.row[k], sys.A.col[k], sys.A.val[k]);
  f.A.resize(sys.A.rows, sys.A.cols);
  f.A.setFromTriplets(trips.begin(), trips.end());
  f.A.makeCompressed();
  f.lu.analyzePattern(f.A);
  f.lu.factorize(f.A);
  if (f.lu.info() != Eigen::Success)
    throw SingularSystemError("sparse LU factorization failed");
}

}  // namespace

AssembledSystem assemble(const MethodConfig& cfg, const ActiveMesh& am,
                         const ProblemData& data) {
  validate(cfg, am);

  AssembledSystem out;
  out.config = cfg;
  out.am = &am;
  out.V = build_space(am, cfg.velocity_family, cfg.velocity_degree);
  out.Q = build_space(
      am, Family::Discontinuous,
      pressure_partner_degree(cfg.velocity_family, cfg.velocity_degree));
  if (cfg.method != Method::NC)
    out.W = build_space(am, Family::Lagrange, cfg.velocity_degree + 1);
  if (cfg.method == Method::C2)
    out.M = build_space(am, Family::Discontinuous, multiplier_degree(cfg),
                        Support::CutBand);

  BlockLayout L;
  int off = 0;
  if (out.W) {
    L.omega = off;
    L.n_omega = out.W->ndofs;
    off += L.n_omega;
  }
  L.u = off;
  L.n_u = out.V.ndofs;
  off += L.n_u;
  L.p = off;
  L.n_p = out.Q.ndofs;
  off += L.n_p;
  if (out.M) {
    L.xi = off;
    L.n_xi = out.M->ndofs;
    off += L.n_xi;
  }
  const bool dirichlet = cfg.bc == BcMode::Dirichlet;
  if (dirichlet && cfg.method != Method::C2 && has_flux_border(cfg.variant))
    L.beta = off++;
  if (dirichlet) L.alpha = off++;
  L.dim = off;

  SparseSystem sys;
  sys.A = CooMatrix(L.dim, L.dim);
  sys.rhs.assign(L.dim, 0.0);
  sys.layout = L;

  std::optional<MacroPartition> macro;
  const std::vector<int>* edges = &am.ghost_edges;
  if (cfg.stab.enabled && cfg.stab.flavor == StabFlavor::MacroPatch) {
    macro.emplace(build_macro_partition(am));
    edges = &macro->stab_edges;
  }

  AsmCtx ctx;
  ctx.cfg = &cfg;
  ctx.am = &am;
  ctx.data = &data;
  ctx.W = out.W ? &*out.W : nullptr;
  ctx.V = &out.V;
  ctx.Q = &out.Q;
  ctx.M = out.M ? &*out.M : nullptr;
  ctx.L = L;
  ctx.tau = effective_taus(cfg);
  ctx.gamma = cfg.gamma_a.value_or(cfg.method == Method::NC ? -1.0 : 1.0);
  ctx.edges = edges;
  ctx.flavor = cfg.stab.flavor;
  ctx.A = &sys.A;
  ctx.rhs = &sys.rhs;

  switch (cfg.method) {
    case Method::NC:
      assemble_nc(ctx);
      break;
    case Method::C1:
      assemble_c1(ctx);
      break;
    case Method::C2:
      assemble_c2(ctx);
      break;
  }
  add_borders(ctx);

  const auto fixed = strong_constraints(cfg, am, out.V, data);
  sys.symmetric =
      cfg.method == Method::C2 && data.coriolis == 0.0 && fixed.empty();
  apply_constraints(sys, fixed);

  out.sys = std::move(sys);
  return out;
}

SolutionFields solve(const SparseSystem& sys) {
  Factorized f;
  factorize_into(sys, f);
  const int n = sys.A.rows;

  Eigen::Map<const Eigen::VectorXd> b(sys.rhs.data(), n);
  Eigen::VectorXd x = f.lu.solve(b);
  if (!x.allFinite()) throw SingularSystemError("solution is not finite");
  for (int it = 0; it < 2; ++it) {
    const Eigen::VectorXd r = b - f.A * x;
    const Eigen::VectorXd dx = f.lu.solve(r);
    if (!dx.allFinite()) break;
    x += dx;
  }
  if (!x.allFinite()) throw SingularSystemError("solution is not finite");
  const Eigen::VectorXd r = b - f.A * x;

  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < f.A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(f.A, c); it; ++it)
      rowsum[it.row()] += std::abs(it.value());

  SolutionFields fields;
  fields.raw.assign(x.data(), x.data() + n);
  const double denom =
      rowsum.maxCoeff() * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
  fields.residual = denom > 0 ? r.cwiseAbs().maxCoeff() / denom : 0.0;

  const BlockLayout& L = sys.layout;
  const auto cut = [&fields](int off, int cnt) {
    return std::vector<double>(fields.raw.begin() + off,
                               fields.raw.begin() + off + cnt);
  };
  if (L.omega >= 0) fields.omega = cut(L.omega, L.n_omega);
  if (L.u >= 0) fields.u = cut(L.u, L.n_u);
  if (L.p >= 0) fields.p = cut(L.p, L.n_p);
  if (L.xi >= 0) fields.xi = cut(L.xi, L.n_xi);
  if (L.beta >= 0) fields.beta = fields.raw[L.beta];
  if (L.alpha >= 0) fields.alpha = fields.raw[L.alpha];
  return fields;
}

double estimate_cond1(const SparseSystem& sys) {
  Factorized f;
  factorize_into(sys, f);
  const int n = sys.A.rows;
  if (n == 0) return 0.0;

  double norm_a = 0.0;
  for (int c = 0; c < f.A.outerSize(); ++c) {
    double colsum = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(f.A, c); it; ++it)
      colsum += std::abs(it.value());
    norm_a = std::max(norm_a, colsum);
  }

  // Hager's lower bound for ||A^-1||_1: ascend the subgradient of
  // x -> ||A^-1 x||_1 over the cross-polytope, starting from the uniform
  // vector; each step needs one solve with A and one with A^T.
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  double est = 0.0;
  Eigen::Index last = -1;
  for (int it = 0; it < 5; ++it) {
    const Eigen::VectorXd y = f.lu.solve(x);
    est = y.lpNorm<1>();
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = y[i] >= 0 ? 1.0 : -1.0;
    const Eigen::VectorXd z = f.lu.transpose().solve(s);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || j == last) break;
    x.setZero();
    x[j] = 1.0;
    last = j;
  }

  // Alternating probe guarding against symmetric cancellation.
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = (i % 2 ? -1.0 : 1.0) *
           (1.0 + static_cast<double>(i) / std::max(n - 1, 1));
  est = std::max(est, 2.0 * f.lu.solve(v).lpNorm<1>() / (3.0 * n));
  return norm_a * est;
}

DivergenceReport check_divergence(const FeSpace& V,
                                  const std::vector<double>& u, double alpha) {
  const ActiveMesh& am = *V.am;
  DivergenceReport rep;
  rep.element_max.assign(am.bg.triangles.size(), 0.0);

  double l2 = 0.0;
  for (int t : am.active_elems) {
    if (!V.elem_supported[t]) continue;
    double local = 0.0;

    const auto rule = element_inside_rule(am, t, 4);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double d = eval_div(V, u, t, rule.points[q]);
      local = std::max(local, std::abs(d));
      rep.linf_defect = std::max(rep.linf_defect, std::abs(d + alpha));
      l2 += rule.weights[q] * d * d;
    }

    // Interior lattice (barycentric (i, j, k)/5 with i, j, k >= 1), clipped
    // to Omega on cut elements.
    const auto co = am.bg.tri_coords(t);
    const bool cut = am.elem_class[t] == ElementClass::Cut;
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 4 - i; ++j) {
        const int k = 5 - i - j;
        const Vec2 pt = (co[0] * i + co[1] * j + co[2] * k) / 5.0;
        if (cut && am.domain(pt) > 0) continue;
        const double d = eval_div(V, u, t, pt);
        local = std::max(local, std::abs(d));
        rep.linf_defect = std::max(rep.linf_defect, std::abs(d + alpha));
      }
    }

    rep.element_max[t] = local;
    rep.linf = std::max(rep.linf, local);
  }
  rep.l2 = std::sqrt(l2);
  return rep;
}

void write_matrix_market(const CooMatrix& A, const std::string& path) {
  std::map<std::pair<int, int>, double> entries;
  for (std::size_t k = 0; k < A.nnz(); ++k)
    entries[{A.row[k], A.col[k]}] += A.val[k];

  std::ofstream out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows << ' ' << A.cols << ' ' << entries.size() << '\n';
  out << std::setprecision(17);
  for (const auto& [rc, v] : entries)
    out << rc.first + 1 << ' ' << rc.second + 1 << ' ' << v << '\n';
}

}  // namespace cutstokes
