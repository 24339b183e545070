#pragma once
/// @file system.hpp
/// Global assembly of the three discretizations into bordered saddle-point
/// systems, a sparse direct solve with iterative refinement, a 1-norm
/// condition estimator, and pointwise divergence diagnostics.
///
/// Unknown blocks are ordered [vorticity | velocity | pressure | multiplier |
/// flux border | mean border].  With A the velocity operator (viscous +
/// tangential interior penalty + boundary terms + s_a), B = b0 - interface
/// correction + s_b and B0 = b0 + s_b, the NC layout reads
///
///     [ A     -B^T   zf   0  ] [u]   [F  ]
///     [ B0     0     0    mp ] [p] = [0  ]         zf_i = oint v_i . n,
///     [ zf^T   0     0    0  ] [b]   [zfg]         mp_j = (1, q_j),
///     [ 0      mp^T  0    0  ] [a]   [0  ]
///
/// C1 prepends the vorticity row and column (mass + s_m against curl + s_c)
/// and swaps the Nitsche terms for a plain normal penalty.  C2 swaps the
/// penalty for a cut-band multiplier and is assembled in a symmetric
/// normalization (vorticity, pressure, and mean rows negated; multiplier row
/// and column scaled).  The standard variant replaces s_b by the pressure
/// jump penalty s_p and drops the flux border; modification 1 keeps s_b but
/// drops the border; modification 2 puts the border back on top of s_p.
///
/// The flux border forces the total boundary flux of u_h, which in turn pins
/// the mean multiplier to zero and makes div u_h vanish identically; the two
/// modifications break exactly one link each of that chain and are kept for
/// the divergence-defect studies.
///
/// Boundary conditions: on fitted facets the normal component is imposed
/// strongly (edge-moment rows replaced by identity rows; columns kept) and
/// the tangential component weakly; on the unfitted interface everything is
/// weak.  The alternative mode (tangential velocity and pressure given)
/// imposes nothing strongly and carries no borders.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutstokes/forms.hpp"
#include "cutstokes/mesh.hpp"
#include "cutstokes/spaces.hpp"

namespace cutstokes {

/// Method/element/variant combination that cannot be assembled.
struct IncompatibleSpacesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// C2 requested on a mesh whose boundary intersects no element: the
/// multiplier space would be empty.
struct EmptyCutBoundaryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Factorization failed or produced a non-finite solution.
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method {
  NC,  ///< H(div) velocity, tangential interior penalty, Nitsche boundary
  C1,  ///< vorticity-velocity-pressure, normal penalty boundary
  C2,  ///< vorticity-velocity-pressure, Lagrange multiplier boundary
};

enum class Variant {
  Proposed,       ///< s_b + flux and mean borders (exactly divergence-free)
  Standard,       ///< s_p + mean border only
  Modification1,  ///< s_b, mean border only: div u_h = -a, a constant
  Modification2,  ///< s_p + both borders: defect concentrates on stab edges
};

enum class BcMode {
  Dirichlet,    ///< velocity given on the whole boundary
  Alternative,  ///< tangential velocity and pressure given (C1 only)
};

/// Ghost-penalty switches.  A tau of zero disables the term; `enabled = false`
/// disables all of them at once (the conditioning studies).
struct StabilizationConfig {
  bool enabled = true;
  StabFlavor flavor = StabFlavor::EdgeJump;
  double tau_a = 1.0;   ///< velocity jumps
  double tau_b = 1.0;   ///< (div u, q) jumps (proposed / modification 1)
  double tau_m = 1.0;   ///< vorticity jumps (C1/C2)
  double tau_c = 1.0;   ///< (crl phi, u) jumps (C1/C2)
  double tau_p = 1.0;   ///< pressure jumps (standard / modification 2)
  double tau_xi = 1.0;  ///< multiplier jumps (C2)
};

/// Everything that selects a discretization.  The pressure degree is derived
/// from the velocity element; the vorticity space (C1/C2) is Lagrange of
/// degree k+1; the multiplier (C2) is discontinuous of degree
/// `multiplier_degree` on the cut band (-1 = the velocity family index k).
struct MethodConfig {
  Method method = Method::NC;
  Variant variant = Variant::Proposed;
  BcMode bc = BcMode::Dirichlet;

  Family velocity_family = Family::BrezziDouglasMarini;
  int velocity_degree = 1;
  int multiplier_degree = -1;
  double multiplier_scale = 1.0;  ///< C2: xi and chi are scaled by this

  StabilizationConfig stab;
  /// Exponent sign in the s_a weights; defaults to -1 for NC and +1 for C1.
  std::optional<double> gamma_a;

  double lambda_u = 4000.0;   ///< NC Dirichlet penalty (tangential when split)
  double lambda_t = 1.0;      ///< tangential interior penalty; split Nitsche
  double lambda_un = 4000.0;  ///< C1 normal penalty; normal part when split
  bool split_penalty = false; ///< NC: separate tangential/normal weights

  /// Drop the interface correction from the momentum pressure coupling
  /// (an option for the lowest-order pairs).
  bool lowest_order_b0 = false;
};

/// Problem data; all fields are evaluated in physical coordinates.
struct ProblemData {
  double mu = 1.0;
  double coriolis = 0.0;  ///< Lambda: adds 2*Lambda*(-u2, u1) to the momentum
  VectorField f;          ///< volume load
  VectorField g;          ///< Dirichlet velocity data (whole boundary)
  ScalarField p0;         ///< boundary pressure data (alternative mode)
};

/// Block offsets inside the global vector; -1 marks an absent block.  The
/// borders are single rows.
struct BlockLayout {
  int omega = -1, u = -1, p = -1, xi = -1, beta = -1, alpha = -1;
  int n_omega = 0, n_u = 0, n_p = 0, n_xi = 0;
  int dim = 0;
};

/// Assembled matrix (triplet form, duplicates add) with right-hand side.
struct SparseSystem {
  CooMatrix A;
  std::vector<double> rhs;
  BlockLayout layout;
  bool symmetric = false;  ///< exactly symmetric by construction (C2, no
                           ///< strong rows, no Coriolis)
};

/// System plus the spaces needed to interpret its solution.
struct AssembledSystem {
  MethodConfig config;
  const ActiveMesh* am = nullptr;
  std::optional<FeSpace> W;  ///< vorticity (C1/C2)
  FeSpace V;                 ///< velocity
  FeSpace Q;                 ///< pressure
  std::optional<FeSpace> M;  ///< multiplier (C2)
  SparseSystem sys;
};

/// Build spaces and assemble the configured system on an active mesh.
/// Throws IncompatibleSpacesError for unsupported combinations and
/// EmptyCutBoundaryError for C2 without cut elements.
AssembledSystem assemble(const MethodConfig& cfg, const ActiveMesh& am,
                         const ProblemData& data);

/// Solution unpacked by block, plus the scaled solve residual
/// ||b - Ax||_inf / (||A||_inf ||x||_inf + ||b||_inf).
struct SolutionFields {
  std::vector<double> omega, u, p, xi;
  double beta = 0.0, alpha = 0.0;
  double residual = 0.0;
  std::vector<double> raw;
};

/// Sparse LU (threshold partial pivoting) with two steps of iterative
/// refinement.  Throws SingularSystemError when the factorization fails or
/// the solution is not finite.
SolutionFields solve(const SparseSystem& sys);

/// Lower bound for the 1-norm condition number ||A||_1 ||A^-1||_1 via a
/// Hager-style estimate on the factorized inverse (deterministic: all-ones
/// start vector, at most five iterations, plus one alternating-sign probe).
double estimate_cond1(const SparseSystem& sys);

/// Pointwise divergence survey: |div u_h| at the volume quadrature points
/// and at a 6-point interior lattice of every active element (lattice points
/// outside Omega are skipped on cut elements).
struct DivergenceReport {
  double linf = 0.0;
  double l2 = 0.0;          ///< sqrt(int_Omega (div u_h)^2)
  double linf_defect = 0.0; ///< max |div u_h + alpha|
  std::vector<double> element_max;  ///< per background element; 0 off-active
};
DivergenceReport check_divergence(const FeSpace& V,
                                  const std::vector<double>& u,
                                  double alpha = 0.0);

/// Coordinate-format MatrixMarket export (entries compressed and sorted).
void write_matrix_market(const CooMatrix& A, const std::string& path);

}  // namespace cutstokes
