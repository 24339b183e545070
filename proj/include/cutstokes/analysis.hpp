#pragma once
/// @file analysis.hpp
/// Error norms over the clipped domain, convergence rates, pressure
/// robustness comparisons, and report emission (CSV / JSON / SVG).
///
/// All integrals run over Omega_h, the piecewise-linear inside region the
/// discretization itself sees; its O(h^2) distance to Omega is below every
/// order measured here.  Gradient errors are broken (elementwise) H^1
/// seminorm differences without jump terms.

#include <stdexcept>
#include <string>
#include <vector>

#include "cutstokes/forms.hpp"
#include "cutstokes/spaces.hpp"
#include "cutstokes/system.hpp"

namespace cutstokes {

/// Two coefficient vectors were claimed to live on the same space but do not.
struct MeshMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using MatrixField = std::function<Mat2(Vec2)>;

/// sqrt( sum_T int_{T cap Omega_h} |exact - field_h|^2 ), scalar / vector /
/// broken-gradient flavors.
double error_l2(const FeSpace& V, const std::vector<double>& u,
                const ScalarField& exact);
double error_l2(const FeSpace& V, const std::vector<double>& u,
                const VectorField& exact);
double error_l2_gradient(const FeSpace& V, const std::vector<double>& u,
                         const MatrixField& exact_grad);

/// Pressure error modulo constants: the exact pressure is shifted so that
/// its mean over Omega_h matches the discrete mean (the assembled systems
/// pin the discrete mean to zero; exact pressures are normalized over the
/// continuous domain, which differs by a constant).
double pressure_error_l2(const FeSpace& Q, const std::vector<double>& p,
                         const ScalarField& exact);

/// log(e_coarse / e_fine) / log(h_coarse / h_fine).
double convergence_rate(double e_coarse, double e_fine, double h_coarse,
                        double h_fine);

/// ||a - b||_{L2(Omega_h)} / max(||a||_{L2(Omega_h)}, 1e-30) for two
/// coefficient vectors on the same space.  Throws MeshMismatchError when the
/// sizes do not match the space.
double pressure_robustness_diff(const FeSpace& V, const std::vector<double>& a,
                                const std::vector<double>& b);

/// One mesh of a refinement study.
struct ErrorRow {
  double h = 0.0;
  int dofs = 0;
  double u_l2 = 0.0;
  double grad_u_l2 = 0.0;
  double p_l2 = 0.0;
  double div_linf = 0.0;
  double div_l2 = 0.0;
  double cond = 0.0;
  double residual = 0.0;
  double alpha = 0.0;
};

/// Rates between two consecutive rows; NaN marks an undefined entry (equal
/// h or a vanishing error).
struct RateRow {
  double u_l2, grad_u_l2, p_l2;
};

struct ErrorReport {
  std::string title;
  std::vector<ErrorRow> rows;
  /// One entry per consecutive row pair (empty for fewer than two rows).
  std::vector<RateRow> rates() const;
};

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool svg = false;
};

/// Write the selected formats into `dir` (created if missing) as report.csv,
/// report.json, and convergence.svg; returns the written paths.  IO failures
/// throw std::runtime_error naming the path.
std::vector<std::string> emit_report(const ErrorReport& report,
                                     const std::string& dir,
                                     const ReportFormats& formats = {});

/// Stable column order, 17 significant digits; the three rate columns are
/// appended only when the report has at least two rows, and the first row
/// leaves them empty.
void write_report_csv(const ErrorReport& report, const std::string& path);
/// Schema-versioned JSON carrying the same rows and rates (null = undefined).
void write_report_json(const ErrorReport& report, const std::string& path);
/// Log-log error-versus-h polylines with reference-slope guides.
void write_convergence_svg(const ErrorReport& report, const std::string& path);
/// Per-element heatmap of a divergence survey on the active mesh.
void write_divergence_heatmap_svg(const ActiveMesh& am,
                                  const std::vector<double>& element_max,
                                  const std::string& path);

}  // namespace cutstokes
