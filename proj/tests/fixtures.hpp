#pragma once

#include "tfm/caseio.hpp"
#include "tfm/ipcs.hpp"

#include <cmath>
#include <numbers>

namespace fixtures {

/// Coarse column with the default physics.
inline tfm::StepContext coarse_context(int nx = 8, int ny = 16, bool bounded = true) {
  tfm::CaseConfig c;
  c.nx = nx;
  c.ny = ny;
  c.bounded = bounded;
  return tfm::StepContext::build(c);
}

/// Smooth state away from equilibrium: a liquid vortex, gas rising with a
/// nonuniform slip and a Gaussian gas patch. Velocities vanish on the walls.
inline tfm::State stirred_state(const tfm::StepContext& ctx) {
  using tfm::Vec2;
  const double W = ctx.disc.mesh->width(), H = ctx.disc.mesh->height();
  tfm::State s = tfm::initial_state(ctx.disc, ctx.config);
  const auto pi = std::numbers::pi;
  const auto vortex = [&](Vec2 p, int c) {
    const double xs = (p.x + 0.5 * W) / W, ys = p.y / H;
    const double sx = std::sin(pi * xs), sy = std::sin(pi * ys);
    return c == 0 ? 0.3 * sx * sx * std::sin(2 * pi * ys) : -0.3 * std::sin(2 * pi * xs) * sy * sy * (W / H);
  };
  s.v_l = tfm::interpolate(ctx.disc.vector, vortex);
  s.t_tilde = 0.8; // past the inlet ramp, so the inlet data is steady
  const double t_seconds = s.t_tilde * ctx.groups.t_s;
  s.v_g = tfm::interpolate(ctx.disc.vector, [&](Vec2 p, int c) {
    if (c == 0) return vortex(p, c);
    // blend from the inlet profile at y = 0 to a nonuniform slip aloft
    const double xs = (p.x + 0.5 * W) / W, ys = p.y / H;
    const double inlet =
        tfm::inlet_profiles(p.x * ctx.config.scales.x_s, t_seconds, ctx.config).v_g_y / ctx.config.scales.v_s;
    return vortex(p, c) + (1.0 - ys) * inlet + ys * (0.6 + 0.3 * std::sin(pi * xs));
  });
  s.alpha_g = tfm::interpolate(ctx.disc.scalar, [&](Vec2 p, int) {
    return 0.03 * std::exp(-(p.x * p.x + (p.y - 0.4 * H) * (p.y - 0.4 * H)) / 0.05);
  });
  for (std::size_t i = 0; i < s.alpha_l.size(); ++i) s.alpha_l[i] = 1.0 - s.alpha_g[i];
  return s;
}

} // namespace fixtures
