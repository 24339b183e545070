#pragma once
/// @file presets.hpp
/// Benchmark problems with their domains, data, and reference solutions:
///
///   ex1  manufactured vortex in a disk of radius 1/2 inside the unit box;
///        the disk center may be shifted (cut-position robustness studies)
///        and the data shift with it.  Also available with the alternative
///        boundary conditions (tangential velocity and pressure given).
///   ex2  L-shaped channel in [0,4]x[0,2] with a Coriolis force, parabolic
///        inflow/outflow and no-slip walls; two sides of the channel are
///        unfitted.  No closed-form solution; used for comparative runs.
///   ex3  no-flow strip: gravity-like load with exact solution u = 0 and a
///        pressure proportional to Ra.  The top boundary {y = 1} misses the
///        mesh lines by 1e-12, so the whole top row of cells is cut; the
///        other three sides are fitted.
///
/// Every preset satisfies the compatibility condition oint g . n = 0.

#include <array>
#include <functional>
#include <string>

#include "cutstokes/mesh.hpp"
#include "cutstokes/system.hpp"

namespace cutstokes {

/// Closed-form reference fields (known = false for ex2).  `vorticity` is
/// mu * (d2 u1 - d1 u2), the scalar field approximated by the C-method
/// auxiliary variable.
struct ExactSolution {
  bool known = false;
  VectorField u;
  std::function<Mat2(Vec2)> grad_u;
  ScalarField p;
  ScalarField vorticity;
};

/// A benchmark problem: domain, mesh conventions, data, reference solution,
/// and the penalty parameters the studies use by default.
struct Preset {
  std::string name;
  LevelSetDomain domain;
  DiagonalPattern diag = DiagonalPattern::Alternating;
  int default_nx = 10;   ///< coarsest study resolution (cells along x)
  double aspect = 1.0;   ///< ny = round(aspect * nx)
  ProblemData data;
  ExactSolution exact;
  double lambda_u = 4000.0;
  double lambda_t = 1.0;
  double lambda_un = 4000.0;
  bool split_penalty = false;
};

/// Manufactured disk vortex; `shift` moves the disk center (and the whole
/// solution) away from (0.5, 0.5).
Preset preset_ex1(Vec2 shift = {0.0, 0.0});

/// Same problem posed with the alternative boundary conditions.
Preset preset_ex1_altbc(Vec2 shift = {0.0, 0.0});

/// L-shaped channel with Coriolis parameter Lambda.
Preset preset_ex2(double lambda_coriolis);

/// No-flow strip at Rayleigh-like parameter Ra; `scale_penalty` multiplies
/// the boundary penalties by Ra (the pressure-robustness variant).
Preset preset_ex3(double ra, bool scale_penalty = false);

/// Background mesh at a given resolution following the preset conventions.
BackgroundMesh preset_background(const Preset& ps, int nx);

/// Fold the preset's penalty defaults into a method configuration.
MethodConfig apply_preset_penalties(MethodConfig cfg, const Preset& ps);

}  // namespace cutstokes
