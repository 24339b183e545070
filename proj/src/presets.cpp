#include "cutstokes/presets.hpp"

#include <cmath>

namespace cutstokes {

Preset preset_ex1(Vec2 shift) {
  const std::array<double, 4> box{0, 0, 1, 1};
  const Vec2 c{0.5 + shift.x, 0.5 + shift.y};

  Preset ps;
  ps.name = "ex1";
  ps.domain = LevelSetDomain::disk(c, 0.5, box);
  ps.diag = DiagonalPattern::Alternating;
  ps.default_nx = 10;
  ps.aspect = 1.0;
  ps.lambda_u = ps.lambda_un = 4000.0;
  ps.lambda_t = 1.0;

  // q vanishes on the circle, so u = 2q (2(y-cy), -2(x-cx)) is a no-slip
  // vortex; it is divergence-free because q is radial about the center.
  auto q = [c](Vec2 p) {
    const double x = p.x - c.x, y = p.y - c.y;
    return x * x + y * y - 0.25;
  };
  const double sx = shift.x, sy = shift.y;

  ps.exact.known = true;
  ps.exact.u = [=](Vec2 p) {
    const double qq = q(p);
    return Vec2{4 * qq * (p.y - c.y), -4 * qq * (p.x - c.x)};
  };
  ps.exact.grad_u = [=](Vec2 p) {
    const double qq = q(p);
    const double x = p.x - c.x, y = p.y - c.y;
    return Mat2{8 * x * y, 4 * qq + 8 * y * y,  //
                -4 * qq - 8 * x * x, -8 * x * y};
  };
  ps.exact.p = [=](Vec2 p) {
    const double s = (p.x - sx) * (p.x - sx) - (p.y - sy) * (p.y - sy);
    return 10 * s * s;
  };
  ps.exact.vorticity = [=](Vec2 p) { return 16 * q(p) + 2.0; };

  ps.data.mu = 1.0;
  ps.data.f = [=](Vec2 p) {
    const double s = (p.x - sx) * (p.x - sx) - (p.y - sy) * (p.y - sy);
    return Vec2{-32 * (p.y - c.y) + 40 * (p.x - sx) * s,
                32 * (p.x - c.x) - 40 * (p.y - sy) * s};
  };
  ps.data.g = ps.exact.u;
  ps.data.p0 = ps.exact.p;
  return ps;
}

Preset preset_ex1_altbc(Vec2 shift) {
  Preset ps = preset_ex1(shift);
  ps.name = "ex1-altbc";
  return ps;
}

Preset preset_ex2(double lambda_coriolis) {
  const std::array<double, 4> box{0, 0, 4, 2};

  Preset ps;
  ps.name = "ex2";
  ps.domain = LevelSetDomain::lshape(2.0, 1.0, box);
  ps.diag = DiagonalPattern::Alternating;
  ps.default_nx = 77;  // near-square cells; x = 2 and y = 1 cut cells mid-way
  ps.aspect = 0.5;
  ps.lambda_u = 400.0;
  ps.lambda_t = 1.0;
  ps.lambda_un = 400.0;
  ps.split_penalty = true;

  ps.data.mu = 0.01;
  ps.data.coriolis = lambda_coriolis;
  ps.data.f = [](Vec2) { return Vec2{0, 0}; };
  // Parabolic inflow/outflow profiles of equal flux, no-slip elsewhere.
  ps.data.g = [](Vec2 p) {
    if (p.x <= 1e-9) return Vec2{p.y * (2 - p.y) / 2, 0.0};
    if (p.x >= 4 - 1e-9) return Vec2{4 * (2 - p.y) * (p.y - 1), 0.0};
    return Vec2{0, 0};
  };
  ps.data.p0 = [](Vec2) { return 0.0; };
  ps.exact.known = false;
  return ps;
}

Preset preset_ex3(double ra, bool scale_penalty) {
  // The top of the box overshoots {y = 1} by 1e-12: the boundary stays
  // unfitted (the whole top row of cells is cut) while the mesh is uniform.
  const std::array<double, 4> box{0, 0, 1, 1 + 1e-12};

  Preset ps;
  ps.name = "ex3";
  ps.domain = LevelSetDomain::halfplane(1, 1.0, box);
  ps.diag = DiagonalPattern::Uniform;
  ps.default_nx = 10;
  ps.aspect = 1.0;
  ps.lambda_u = ps.lambda_un = scale_penalty ? 1e5 * ra : 1e5;
  ps.lambda_t = 1.0;

  ps.data.mu = 1.0;
  ps.data.f = [ra](Vec2 p) {
    return Vec2{0.0, ra * (1 - p.y + 3 * p.y * p.y)};
  };
  ps.data.g = [](Vec2) { return Vec2{0, 0}; };

  // Hydrostatic balance: u = 0 and grad p = f, with mean-zero pressure.
  ps.exact.known = true;
  ps.exact.u = [](Vec2) { return Vec2{0, 0}; };
  ps.exact.grad_u = [](Vec2) { return Mat2{}; };
  ps.exact.p = [ra](Vec2 p) {
    const double y = p.y;
    return ra * (y * y * y - y * y / 2 + y - 7.0 / 12.0);
  };
  ps.exact.vorticity = [](Vec2) { return 0.0; };
  ps.data.p0 = ps.exact.p;
  return ps;
}

BackgroundMesh preset_background(const Preset& ps, int nx) {
  const int ny = std::max(1, static_cast<int>(std::lround(ps.aspect * nx)));
  return build_background(ps.domain.bbox, nx, ny, ps.diag);
}

MethodConfig apply_preset_penalties(MethodConfig cfg, const Preset& ps) {
  cfg.lambda_u = ps.lambda_u;
  cfg.lambda_t = ps.lambda_t;
  cfg.lambda_un = ps.lambda_un;
  cfg.split_penalty = ps.split_penalty;
  // The benchmark protocol stabilizes through the macroelement patches.
  cfg.stab.flavor = StabFlavor::MacroPatch;
  return cfg;
}

}  // namespace cutstokes
