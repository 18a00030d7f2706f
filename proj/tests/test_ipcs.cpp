#include "doctest.h"
#include "fixtures.hpp"

#include "tfm/errors.hpp"
#include "tfm/ipcs.hpp"
#include "tfm/post.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace tfm;

namespace {

double max_diff(const FeField& a, const FeField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff_state(const State& a, const State& b) {
  return std::max({max_diff(a.alpha_g, b.alpha_g), max_diff(a.alpha_l, b.alpha_l), max_diff(a.v_l, b.v_l),
                   max_diff(a.v_g, b.v_g), max_diff(a.p_l, b.p_l)});
}

// quiescent column: no gas enters, liquid at rest under hydrostatic pressure
StepContext quiet_context() {
  CaseConfig c;
  c.nx = 8;
  c.ny = 16;
  c.inlet_gas_speed = 0.0;
  c.inlet_alpha = 0.0;
  return StepContext::build(c);
}

} // namespace

TEST_CASE("adapt_dt follows the safety-factor rule") {
  auto d = adapt_dt(1e-4, 1e-4, 0.01, 1e-6, 1.0);
  CHECK(d.accept);
  CHECK(d.dt_next == doctest::Approx(0.009));

  d = adapt_dt(0.0, 1e-4, 0.01, 1e-6, 1.0);
  CHECK(d.accept);
  CHECK(d.dt_next == doctest::Approx(0.02));

  d = adapt_dt(1e-2, 1e-4, 0.01, 1e-6, 1.0);
  CHECK_FALSE(d.accept);
  CHECK(d.dt_next == doctest::Approx(0.002));

  // growth is capped by dt_max
  d = adapt_dt(0.0, 1e-4, 0.01, 1e-6, 0.015);
  CHECK(d.dt_next == doctest::Approx(0.015));

  CHECK_THROWS_AS(adapt_dt(1.0, 1e-4, 1e-6, 1e-6, 1.0), StagnationError);
  CHECK_THROWS_AS(adapt_dt(-1.0, 1e-4, 0.01, 1e-6, 1.0), InvalidArgument);
}

TEST_CASE("log_gradient_field floors small fractions") {
  auto ctx = fixtures::coarse_context(2, 2);
  FeField a(ctx.disc.scalar);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i % 2 ? 0.5 : 0.0;
  const FeField l = log_gradient_field(a, 1e-5);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(l[i] == doctest::Approx(std::log(i % 2 ? 0.5 : 1e-5)));
}

TEST_CASE("boundary conditions on inlet, walls and outlet") {
  auto ctx = fixtures::coarse_context();
  const auto& space = *ctx.disc.vector;
  const double W = ctx.disc.mesh->width();

  SUBCASE("inlet is closed before the ramp starts") {
    const auto bc = boundary_conditions(ctx, 0.0);
    for (double v : bc.v_g.values) CHECK(v == 0.0);
    for (double v : bc.alpha_g.values) CHECK(v == 0.0);
  }
  SUBCASE("walls and inlet values after the ramp") {
    const double t = 0.8;
    const auto bc = boundary_conditions(ctx, t);
    for (double v : bc.v_l.values) CHECK(v == 0.0);
    const auto& xs = ctx.disc.scalar->node_coords();
    for (std::size_t k = 0; k < bc.alpha_g.dofs.size(); ++k) {
      const Vec2 p = xs[bc.alpha_g.dofs[k]];
      const bool wall = std::abs(std::abs(p.x) - 0.5 * W) < 1e-12;
      const double expected =
          wall ? 0.0 : inlet_profiles(p.x * ctx.config.scales.x_s, t * ctx.groups.t_s, ctx.config).alpha_g;
      CHECK(bc.alpha_g.values[k] == doctest::Approx(expected).epsilon(1e-12));
    }
    const auto& vx = space.node_coords();
    for (std::size_t k = 0; k < bc.v_g.dofs.size(); ++k) {
      const int dof = bc.v_g.dofs[k];
      const Vec2 p = vx[dof / 2];
      // gas walls fix only the normal component
      if (dof % 2 == 0) {
        CHECK(bc.v_g.values[k] == 0.0);
      } else if (p.y < 1e-12) {
        const double v = inlet_profiles(p.x * ctx.config.scales.x_s, t * ctx.groups.t_s, ctx.config).v_g_y;
        CHECK(bc.v_g.values[k] == doctest::Approx(v / ctx.config.scales.v_s).epsilon(1e-12));
      }
    }
    const double H = ctx.disc.mesh->height();
    for (int d : bc.pressure) CHECK(xs[d].y == doctest::Approx(H));
    CHECK_FALSE(bc.pressure.empty());
  }
}

TEST_CASE("hydrostatic column is a fixed point once the gas has relaxed") {
  const auto ctx = quiet_context();
  const double dt = 0.01;
  State s = initial_state(ctx.disc, ctx.config);
  auto [s1, r1] = step(s, dt, ctx);
  CHECK(max_diff(s1.alpha_g, s.alpha_g) <= 1e-8);
  CHECK(max_diff(s1.v_l, s.v_l) <= 1e-8);
  CHECK(max_diff(s1.p_l, s.p_l) <= 1e-8);

  State cur = s1;
  for (int k = 0; k < 60; ++k) {
    auto [next, rep] = step(cur, dt, ctx);
    const double d = max_diff(next.v_g, cur.v_g);
    cur = next;
    if (d < 1e-13) break;
  }
  auto [next, rep] = step(cur, dt, ctx);
  CHECK(max_diff_state(next, cur) <= 1e-8);
}

TEST_CASE("Heun error estimate is second order in dt") {
  auto ctx = fixtures::coarse_context();
  ctx.config.tol_linear = 1e-14;
  ctx.config.max_linear_iter = 20000;
  const State s = fixtures::stirred_state(ctx);
  const double dt = 1e-6;
  const double e1 = estimate_local_error(s, dt, ctx);
  const double e2 = estimate_local_error(s, dt / 2, ctx);
  const double ratio = e1 / e2;
  MESSAGE("error ratio " << ratio);
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("alpha update conserves mass and keeps the phase sum") {
  for (bool bounded : {true, false}) {
    CAPTURE(bounded);
    CaseConfig c;
    c.nx = 8;
    c.ny = 16;
    c.ramp_time = 0.05;
    c.bounded = bounded;
    const auto ctx = StepContext::build(c);
    State s = initial_state(ctx.disc, c);
    for (int k = 0; k < 12; ++k) {
      auto [next, rep] = step(s, 0.01, ctx);
      const auto mb = alpha_mass_balance(s, next, 0.01, ctx);
      CHECK(mb.relative <= 1e-6);
      for (std::size_t i = 0; i < next.alpha_g.size(); ++i)
        CHECK(std::abs(next.alpha_g[i] + next.alpha_l[i] - 1.0) <= 1e-12);
      if (bounded) CHECK(rep.min_alpha_g >= -1e-9);
      if (!bounded) CHECK(mb.bound_source == 0.0);
      s = next;
    }
  }
}

TEST_CASE("alternating mesh keeps a symmetric start symmetric") {
  CaseConfig c;
  c.nx = 8;
  c.ny = 16;
  c.ramp_time = 0.05;
  const auto ctx = StepContext::build(c);
  State s = initial_state(ctx.disc, c);
  while (s.t_tilde * ctx.groups.t_s < 0.3) s = step(s, 0.01, ctx).first;

  const auto xs = ctx.disc.scalar->node_coords();
  double worst = 0.0;
  int matched = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (std::abs(xs[i].x + xs[j].x) < 1e-12 && std::abs(xs[i].y - xs[j].y) < 1e-12) {
        worst = std::max(worst, std::abs(s.alpha_g[i] - s.alpha_g[j]));
        ++matched;
      }
  CHECK(matched == static_cast<int>(xs.size()));
  CHECK(worst <= 1e-6);
}

TEST_CASE("sub-step failures name the sub-step") {
  auto ctx = fixtures::coarse_context();
  ctx.config.tol_linear = 1e-30;
  ctx.config.max_linear_iter = 1;
  const State s = fixtures::stirred_state(ctx);
  try {
    step(s, 1e-3, ctx);
    FAIL("expected a StepFailure");
  } catch (const StepFailure& e) {
    CHECK(std::string(e.substep()) == "tentative_velocity");
  }
}

TEST_CASE("run with zero duration writes the initial record") {
  const auto dir = std::filesystem::temp_directory_path() / "tfm_ipcs_run0";
  std::filesystem::remove_all(dir);
  CaseConfig c;
  c.nx = 4;
  c.ny = 8;
  c.t_end = 0.0;
  c.output_dir = dir.string();
  const RunRecord rec = run(c);
  CHECK(rec.accepted_steps == 0);
  REQUIRE(rec.series.size() == 1);
  CHECK(rec.series[0].holdup == 0.0);
  CHECK(rec.snapshots == 1);
  CHECK(std::filesystem::exists(dir / "series.csv"));
  CHECK(std::filesystem::exists(dir / "snap_000000.vtk"));
  std::ifstream in(dir / "series.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("short run advances to t_end with accepted steps") {
  CaseConfig c;
  c.nx = 4;
  c.ny = 8;
  c.t_end = 0.02;
  int seen = 0;
  const RunRecord rec = run(c, [&](const State&, const StepReport&) { ++seen; });
  CHECK(rec.accepted_steps > 0);
  CHECK(seen == rec.accepted_steps + rec.rejected_steps);
  CHECK(rec.final_state.t_tilde * StepContext::build(c).groups.t_s == doctest::Approx(0.02));
  CHECK(rec.series.back().holdup > 0.0);
}
