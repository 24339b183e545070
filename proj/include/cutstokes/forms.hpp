#pragma once
/// @file forms.hpp
/// Element, interface, edge, and patch kernels for every bilinear and linear
/// form of the three discretizations.
///
/// Matrix kernels emit entries (i, j) = form(first argument dof i, second
/// argument dof j), in the argument order the form is written in; a BlockSink
/// places them (optionally transposed and scaled) inside a global coordinate
/// matrix, so the same kernel serves both orientations of a coupling block.
/// Functional kernels emit into a slice of the right-hand side.
///
/// Ghost penalties come in two flavors sharing one jump engine:
///   edge-jump     sum_j w_j (jump(D^j_n a), jump(D^j_n b))_F over full edges,
///   macro-patch   sum_j w_j ([D^j_n a], [D^j_n b])_{P_F} with [w] the
///                 difference of the canonical polynomial extensions of the
///                 two restrictions, integrated over both patch triangles.
/// Both evaluate derivative jumps exactly from the Poly2 coefficients.

#include <functional>
#include <vector>

#include "cutstokes/mesh.hpp"
#include "cutstokes/spaces.hpp"

namespace cutstokes {

/// Sparse matrix in coordinate (triplet) form; duplicates add up.
struct CooMatrix {
  int rows = 0, cols = 0;
  std::vector<int> row, col;
  std::vector<double> val;

  CooMatrix() = default;
  CooMatrix(int r, int c) : rows(r), cols(c) {}
  void add(int r, int c, double v) {
    row.push_back(r);
    col.push_back(c);
    val.push_back(v);
  }
  std::size_t nnz() const { return val.size(); }
};

/// Placement of kernel entries inside a global matrix: entry (i, j) lands at
/// (row0 + i, col0 + j), or at (row0 + j, col0 + i) when transposed; always
/// scaled.  Zero entries are dropped.
struct BlockSink {
  CooMatrix* A = nullptr;
  int row0 = 0, col0 = 0;
  double scale = 1.0;
  bool transposed = false;

  void add(int i, int j, double v) const {
    if (v == 0.0) return;
    if (transposed)
      A->add(row0 + j, col0 + i, scale * v);
    else
      A->add(row0 + i, col0 + j, scale * v);
  }
};

inline BlockSink block(CooMatrix& A, int row0, int col0, double scale = 1.0) {
  return {&A, row0, col0, scale, false};
}
/// The kernel's transpose written at (row0, col0): use when the form's second
/// argument is the test function of this block row.
inline BlockSink block_t(CooMatrix& A, int row0, int col0, double scale = 1.0) {
  return {&A, row0, col0, scale, true};
}

/// Placement of functional entries inside a right-hand-side slice.
struct VectorSink {
  std::vector<double>* rhs = nullptr;
  int offset = 0;
  double scale = 1.0;
  void add(int i, double v) const { (*rhs)[offset + i] += scale * v; }
};

inline VectorSink slice(std::vector<double>& rhs, int offset,
                        double scale = 1.0) {
  return {&rhs, offset, scale};
}

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

/// Quadrature over T ∩ Ω: the whole triangle when T is inside, the clipped
/// polygon when T is cut, empty when T is outside.
QuadratureRule element_inside_rule(const ActiveMesh& am, int elem, int degree);

/// Quadrature along T ∩ ∂Ω of a cut element, with the outward unit normal.
struct InterfaceRule {
  QuadratureRule rule;
  Vec2 normal;
};
InterfaceRule interface_rule(const ActiveMesh& am, int elem, int degree);

/// Which parts of ∂Ω a boundary kernel integrates over: the linearized
/// interface inside cut elements, the fitted facets on the mesh rim, or both.
enum class BoundaryParts { Interface, Fitted, All };

/// Dirichlet penalty weight: a single constant, or split into tangential and
/// normal parts (lambda_t, lambda_n).
struct NitschePenalty {
  double lambda = 0.0;
  bool split = false;
  double lambda_t = 0.0, lambda_n = 0.0;
};

//
// Volume kernels (all integrals clipped to Omega).
//

/// (coeff * w, phi)_Omega on a scalar space.
void add_mass_scalar(const BlockSink& out, const FeSpace& W, double coeff);

/// sum_T (mu grad u, grad v)_{T cap Omega}.
void add_viscous(const BlockSink& out, const FeSpace& V, double mu);

/// b0(v, q) = (div v, q)_Omega.
void add_div_pressure(const BlockSink& out, const FeSpace& V, const FeSpace& Q);

/// (crl phi, v)_Omega with crl phi = (-d2 phi, d1 phi).
void add_curl_coupling(const BlockSink& out, const FeSpace& W, const FeSpace& V);

/// Coriolis term 2*Lambda*(u^perp, v)_Omega with u^perp = (-u2, u1).
void add_coriolis(const BlockSink& out, const FeSpace& V, double lambda);

/// (f, v)_Omega.
void add_load(const VectorSink& out, const FeSpace& V, const VectorField& f,
              int degree = 9);

//
// Interface kernels (T cap dOmega over the cut elements).
//

/// Nitsche boundary form, anti-symmetric consistency plus penalty:
///   -(mu grad u . n, v) + (u, mu grad v . n) + penalty(u, v),
/// penalty = lambda h_T^{-1} (u, v), or split into tangential/normal parts.
void add_nitsche(const BlockSink& out, const FeSpace& V, double mu,
                 const NitschePenalty& pen);

/// Data counterpart of add_nitsche: (penalty g, v) + (g, mu grad v . n).
void add_nitsche_data(const VectorSink& out, const FeSpace& V, double mu,
                      const NitschePenalty& pen, const VectorField& g);

/// lambda h_T^{-1} (u . n, v . n)_{T cap dOmega}  (the penalty part of a-check).
void add_normal_penalty(const BlockSink& out, const FeSpace& V, double lambda);

/// lambda h_T^{-1} (g . n, v . n)_{T cap dOmega}.
void add_normal_penalty_data(const VectorSink& out, const FeSpace& V,
                             double lambda, const VectorField& g);

/// sum_T (v . n, q)_{T cap dOmega}  (the correction b0 - b).
void add_pressure_interface(const BlockSink& out, const FeSpace& V,
                            const FeSpace& Q);

/// (xi, v . n) over dOmega restricted to the cut elements: the linearized
/// interface plus the fitted rim facets of cut elements.  Covering the rim
/// parts matters: it makes the all-ones multiplier reproduce the full
/// boundary flux of the cut band, and it couples multiplier modes that
/// vanish on a straight interface (which would otherwise be invisible).
void add_multiplier_coupling(const BlockSink& out, const FeSpace& M,
                             const FeSpace& V);

/// (g . n, chi) over the same boundary parts as add_multiplier_coupling.
void add_multiplier_data(const VectorSink& out, const FeSpace& M,
                         const VectorField& g);

//
// Boundary kernels over selectable parts of dOmega (outward normal n,
// counter-clockwise tangent t = n rotated by +pi/2).
//

/// zf_i = integral of v_i . n over the selected boundary parts.
void add_boundary_flux(const VectorSink& out, const FeSpace& V,
                       BoundaryParts parts);

/// Integral of g . n over the selected boundary parts (constraint data).
double boundary_flux_of_data(const ActiveMesh& am, const VectorField& g,
                             BoundaryParts parts, int degree = 9);

/// mp_i = (1, q_i)_Omega.
void add_mean_value(const VectorSink& out, const FeSpace& Q);

/// (g . t, phi)_dOmega on a scalar space.
void add_tangential_data_scalar(const VectorSink& out, const FeSpace& W,
                                const VectorField& g, BoundaryParts parts,
                                int degree = 9);

/// (s, phi)_dOmega for scalar boundary data s.
void add_scalar_boundary_data(const VectorSink& out, const FeSpace& W,
                              const ScalarField& s, BoundaryParts parts,
                              int degree = 9);

/// (p0, v . n)_dOmega for scalar boundary data p0.
void add_normal_boundary_data(const VectorSink& out, const FeSpace& V,
                              const ScalarField& p0, BoundaryParts parts,
                              int degree = 9);

//
// Tangential interior penalty over the clipped interior edges E cap Omega.
//

/// t(u, v) = sum_F [ -({mu grad(u.t) . n}, [v.t]) + ([u.t], {mu grad(v.t) . n})
///                   + lambda_t h_F^{-1} ([u.t], [v.t]) ]_F.
void add_tangential_ip(const BlockSink& out, const FeSpace& V, double mu,
                       double lambda_t);

//
// Fitted-facet tangential Nitsche terms (single-sided, on the mesh rim where
// it coincides with dOmega; the normal component is constrained strongly).
//

void add_fitted_tangential(const BlockSink& out, const FeSpace& V, double mu,
                           const NitschePenalty& pen);
void add_fitted_tangential_data(const VectorSink& out, const FeSpace& V,
                                double mu, const NitschePenalty& pen,
                                const VectorField& g);

//
// Ghost-penalty stabilization.
//

enum class StabFlavor { EdgeJump, MacroPatch };

/// Quantity of a basis function entering a jump: the function itself, its
/// divergence, or the curl of a scalar.  Scalars are treated as vectors with
/// vanishing second component, so one pairing rule covers everything.
enum class StabQuantity { Value, Divergence, Curl };

/// Generic jump engine: for each edge in `edges` (both incident elements must
/// be supported), pairs order-j normal-derivative jumps of the row quantity
/// with those of the column quantity, weighted by weight[j - jmin], either on
/// the full edge (EdgeJump) or over the two-element patch (MacroPatch).
void add_ghost_penalty(const BlockSink& out, const FeSpace& rows,
                       StabQuantity qrow, const FeSpace& cols,
                       StabQuantity qcol, int jmin, int jmax,
                       const std::vector<double>& weight,
                       const std::vector<int>& edges, StabFlavor flavor);

/// Named stabilization terms with their printed derivative ranges and weights
/// (h is the global mesh parameter of the active mesh):
///   s_a  velocity jumps;       edge: j=0..k+1, tau_a h^{2j+gamma_a};
///                              patch: j=0..k,  tau_a h^{1-gamma_a}
///   s_b  (div u, q) jumps;     edge: j=0..k-hat, tau_b h^{2j+1};
///                              patch: j=0..k,    tau_b
///   s_m  vorticity jumps;      j=1..k; edge weight tau_m h^{2j+1}, patch tau_m
///   s_c  (crl phi, u) jumps;   j=0..k; edge weight tau_c h^{2j+1}, patch tau_c
///   s_p  pressure jumps;       edge: j=0..k-hat, tau_p h^{2j+1};
///                              patch: j=0..k,    tau_p
///   s_xi multiplier jumps;     j=0..k-tilde, tau_xi h^{2j}, edge flavor only
/// k is the H(div) family index (= ref degree), k-hat/k-tilde the
/// discontinuous degrees; s_m derives k from the vorticity degree k+1.
void add_stab_velocity(const BlockSink& out, const FeSpace& V, double tau_a,
                       double gamma_a, const std::vector<int>& edges,
                       StabFlavor flavor);
void add_stab_div_pressure(const BlockSink& out, const FeSpace& V,
                           const FeSpace& Q, double tau_b,
                           const std::vector<int>& edges, StabFlavor flavor);
void add_stab_vorticity(const BlockSink& out, const FeSpace& W, double tau_m,
                        const std::vector<int>& edges, StabFlavor flavor);
void add_stab_curl_velocity(const BlockSink& out, const FeSpace& W,
                            const FeSpace& V, double tau_c,
                            const std::vector<int>& edges, StabFlavor flavor);
void add_stab_pressure(const BlockSink& out, const FeSpace& Q, double tau_p,
                       int k, const std::vector<int>& edges, StabFlavor flavor);
void add_stab_multiplier(const BlockSink& out, const FeSpace& M, double tau_xi,
                         const std::vector<int>& edges);

}  // namespace cutstokes
