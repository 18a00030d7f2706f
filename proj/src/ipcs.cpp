#include "tfm/ipcs.hpp"

#include "tfm/errors.hpp"
#include "tfm/post.hpp"
#include "tfm/vi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

namespace tfm {

StepContext StepContext::build(const CaseConfig& config) { return build(config, build_mesh(config)); }

StepContext StepContext::build(const CaseConfig& config, std::shared_ptr<const Mesh> mesh) {
  config.validate();
  StepContext ctx;
  ctx.disc = Discretization::build(std::move(mesh));
  ctx.groups = make_groups(config.props, config.scales, config.C_P);
  ctx.config = config;
  ctx.closures.alpha_floor = config.alpha_floor;
  ctx.closures.implicit_gas_drag = config.implicit_gas_drag;
  return ctx;
}

namespace {

DirichletData to_dirichlet(const std::map<int, double>& m) {
  DirichletData d;
  for (const auto& [dof, v] : m) {
    d.dofs.push_back(dof);
    d.values.push_back(v);
  }
  return d;
}

} // namespace

BoundaryConditions boundary_conditions(const StepContext& ctx, double t_tilde) {
  const CaseConfig& cfg = ctx.config;
  const double t_seconds = t_tilde * ctx.groups.t_s;
  const FunctionSpace& vs = *ctx.disc.vector;
  const FunctionSpace& ss = *ctx.disc.scalar;
  const auto vpos = vs.node_coords();
  const auto spos = ss.node_coords();
  std::map<int, double> vl, vg, ag;
  // later assignments win, so walls go last
  for (int n : vs.boundary_nodes(BoundaryTag::Outlet)) {
    vl[2 * n] = 0.0;
    vg[2 * n] = 0.0;
  }
  for (int n : vs.boundary_nodes(BoundaryTag::Inlet)) {
    const InletValues in = inlet_profiles(vpos[n].x * cfg.scales.x_s, t_seconds, cfg);
    vl[2 * n] = 0.0;
    vl[2 * n + 1] = 0.0;
    vg[2 * n] = 0.0;
    vg[2 * n + 1] = in.v_g_y / cfg.scales.v_s;
  }
  for (int n : ss.boundary_nodes(BoundaryTag::Inlet))
    ag[n] = inlet_profiles(spos[n].x * cfg.scales.x_s, t_seconds, cfg).alpha_g;
  for (BoundaryTag wall : {BoundaryTag::WallLeft, BoundaryTag::WallRight}) {
    for (int n : vs.boundary_nodes(wall)) {
      vl[2 * n] = 0.0;
      vl[2 * n + 1] = 0.0;
      vg[2 * n] = 0.0;
    }
    for (int n : ss.boundary_nodes(wall)) ag[n] = 0.0;
  }
  BoundaryConditions bc{to_dirichlet(vl), to_dirichlet(vg), to_dirichlet(ag),
                        ss.boundary_nodes(BoundaryTag::Outlet)};
  return bc;
}

namespace {

template <class F>
auto guarded(const char* substep, F&& f) {
  try {
    return f();
  } catch (const StepFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StepFailure(substep, e.what());
  }
}

void set_dirichlet_values(Vector& b, const DirichletData& bc) {
  for (std::size_t k = 0; k < bc.dofs.size(); ++k) b[bc.dofs[k]] = bc.values[k];
}

/// Divide every row by its diagonal.
void scale_rows(LinearSystem& sys) {
  auto vals = sys.A.values();
  const auto off = sys.A.offsets();
  const auto cols = sys.A.columns();
  for (std::size_t i = 0; i < sys.A.rows(); ++i) {
    double d = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k)
      if (cols[k] == static_cast<int>(i)) d = vals[k];
    if (!(d > 0.0)) throw SingularSystem("alpha system has a nonpositive diagonal");
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) vals[k] /= d;
    sys.b[i] /= d;
  }
}

double relative_change(const Vector& heun, const Vector& euler) {
  double d = 0.0, h = 0.0;
  for (std::size_t i = 0; i < heun.size(); ++i) {
    d += (heun[i] - euler[i]) * (heun[i] - euler[i]);
    h += heun[i] * heun[i];
  }
  return std::sqrt(d) / std::max(std::sqrt(h), 1.0);
}

} // namespace

TentativeVelocities tentative_velocities(const State& state, double dt, const StepContext& ctx,
                                         bool with_error) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const BoundaryConditions bc = boundary_conditions(ctx, state.t_tilde + dt);
  const double tol = ctx.config.tol_linear;
  const int iters = ctx.config.max_linear_iter;
  TentativeVelocities out;
  std::array<TentativeParts, 2> parts;
  std::array<Vector, 2> euler;
  const std::array<Phase, 2> phases = {Phase::Liquid, Phase::Gas};
  for (int k = 0; k < 2; ++k) {
    const Phase ph = phases[k];
    const DirichletData& d = ph == Phase::Liquid ? bc.v_l : bc.v_g;
    const FeField& v0 = ph == Phase::Liquid ? state.v_l : state.v_g;
    guarded("tentative_velocity", [&] {
      parts[k] = assemble_tentative_parts(ph, state, dt, ctx.groups, ctx.closures);
      Vector rhs = parts[k].history;
      const Vector load = parts[k].loads.total();
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += load[i];
      apply_dirichlet(parts[k].lhs, rhs, d.dofs, d.values, false);
      const SolveResult r = solve_bicgstab(parts[k].lhs, rhs, tol, iters, v0.values());
      out.iterations += r.iterations;
      euler[k] = r.x;
      return 0;
    });
  }
  out.v_l = FeField(ctx.disc.vector, euler[0]);
  out.v_g = FeField(ctx.disc.vector, euler[1]);
  if (!with_error) return out;

  State pred = state;
  pred.v_l = out.v_l;
  pred.v_g = out.v_g;
  pred.t_tilde = state.t_tilde + dt;
  for (int k = 0; k < 2; ++k) {
    const Phase ph = phases[k];
    const DirichletData& d = ph == Phase::Liquid ? bc.v_l : bc.v_g;
    guarded("error_estimate", [&] {
      const Vector f0 = parts[k].loads.total();
      const Vector f1 = tentative_loads(ph, pred, ctx.groups, ctx.closures).total();
      Vector rhs = parts[k].history;
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += 0.5 * (f0[i] + f1[i]);
      set_dirichlet_values(rhs, d);
      const SolveResult r = solve_bicgstab(parts[k].lhs, rhs, tol, iters, euler[k]);
      out.iterations += r.iterations;
      out.error = std::max(out.error, relative_change(r.x, euler[k]));
      return 0;
    });
  }
  return out;
}

State complete_step(const State& state, const TentativeVelocities& tv, double dt,
                    const StepContext& ctx, StepReport& report) {
  const BoundaryConditions bc = boundary_conditions(ctx, state.t_tilde + dt);
  const CaseConfig& cfg = ctx.config;
  State next = state;
  next.t_tilde = state.t_tilde + dt;

  const FeField dp = guarded("pressure_poisson", [&] {
    const LinearSystem sys = assemble_pressure_poisson(state, tv.v_l, tv.v_g, dt, ctx.groups, bc.pressure);
    const SolveResult r = solve_cg(sys.A, sys.b, cfg.tol_linear, cfg.max_linear_iter);
    report.pressure_iterations = r.iterations;
    return FeField(ctx.disc.scalar, r.x);
  });
  for (std::size_t i = 0; i < next.p_l.size(); ++i) next.p_l[i] += dp[i];

  guarded("velocity_update", [&] {
    report.update_iterations = 0;
    for (Phase ph : {Phase::Liquid, Phase::Gas}) {
      const bool liquid = ph == Phase::Liquid;
      const FeField& vs = liquid ? tv.v_l : tv.v_g;
      const LinearSystem sys =
          assemble_velocity_update(ph, vs, dp, dt, ctx.groups, liquid ? bc.v_l : bc.v_g);
      const SolveResult r = solve_cg(sys.A, sys.b, cfg.tol_linear, cfg.max_linear_iter, vs.values());
      report.update_iterations += r.iterations;
      (liquid ? next.v_l : next.v_g) = FeField(ctx.disc.vector, r.x);
    }
    return 0;
  });

  guarded("alpha_update", [&] {
    LinearSystem sys = assemble_alpha_system(state.alpha_g, next.v_g, dt, bc.alpha_g, cfg.supg);
    scale_rows(sys);
    Vector x;
    if (cfg.bounded) {
      const std::size_t n = sys.b.size();
      BoxVIProblem vi{std::move(sys.A), std::move(sys.b), Vector(n, 0.0), Vector(n, 1.0),
                      Vector(state.alpha_g.values().begin(), state.alpha_g.values().end())};
      VIResult r = solve_box_vi(vi, cfg.tol_vi, cfg.max_vi_iter);
      report.vi_iterations = r.iterations;
      x = std::move(r.x);
    } else {
      const SolveResult r =
          solve_bicgstab(sys.A, sys.b, cfg.tol_linear, cfg.max_linear_iter, state.alpha_g.values());
      report.alpha_iterations = r.iterations;
      x = r.x;
    }
    next.alpha_g = FeField(ctx.disc.scalar, std::move(x));
    return 0;
  });
  for (std::size_t i = 0; i < next.alpha_l.size(); ++i) next.alpha_l[i] = 1.0 - next.alpha_g[i];

  const auto a = next.alpha_g.values();
  report.min_alpha_g = *std::min_element(a.begin(), a.end());
  report.max_alpha_g = *std::max_element(a.begin(), a.end());
  report.dt_used = dt;
  return next;
}

std::pair<State, StepReport> step(const State& state, double dt, const StepContext& ctx) {
  StepReport report;
  const TentativeVelocities tv = tentative_velocities(state, dt, ctx, true);
  report.local_error_estimate = tv.error;
  report.tentative_iterations = tv.iterations;
  report.accepted = tv.error <= ctx.config.tol_step;
  State next = complete_step(state, tv, dt, ctx, report);
  return {std::move(next), report};
}

FeField log_gradient_field(const FeField& alpha, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("log floor must be positive");
  if (alpha.space().kind() != SpaceKind::ScalarP1) throw InvalidArgument("expects a P1 field");
  Vector v(alpha.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(std::max(alpha[i], epsilon));
  return FeField(alpha.space_ptr(), std::move(v));
}

double estimate_local_error(const State& state, double dt, const StepContext& ctx) {
  return tentative_velocities(state, dt, ctx, true).error;
}

DtDecision adapt_dt(double error, double tol_step, double dt, double dt_min, double dt_max) {
  if (!(error >= 0.0)) throw InvalidArgument("error estimate must be nonnegative");
  if (!(tol_step > 0.0) || !(dt > 0.0) || !(dt_min > 0.0) || dt_max < dt_min)
    throw InvalidArgument("invalid step-size controller parameters");
  const double factor = std::clamp(0.9 * std::sqrt(tol_step / std::max(error, 1e-16)), 0.2, 2.0);
  DtDecision d;
  d.accept = error <= tol_step;
  const double raw = dt * factor;
  if (!d.accept && raw < dt_min)
    throw StagnationError("step rejected with dt at its lower limit (error " + std::to_string(error) + ")");
  d.dt_next = std::clamp(raw, dt_min, dt_max);
  return d;
}

MassBalance alpha_mass_balance(const State& before, const State& after, double dt,
                               const StepContext& ctx) {
  const BoundaryConditions bc = boundary_conditions(ctx, before.t_tilde + dt);
  const Vector r = alpha_residual(before.alpha_g, after.alpha_g, after.v_g, dt, ctx.config.supg);
  std::vector<char> fixed(r.size(), 0);
  for (int d : bc.alpha_g.dofs) fixed[d] = 1;
  MassBalance m;
  m.storage = (integrate(after.alpha_g) - integrate(before.alpha_g)) / dt;
  m.outflow = boundary_flux(after.alpha_g, after.v_g, BoundaryTag::Outlet);
  m.inlet_flux = -boundary_flux(after.alpha_g, after.v_g, BoundaryTag::Inlet);
  const double other = boundary_flux(after.alpha_g, after.v_g, BoundaryTag::Inlet) +
                       boundary_flux(after.alpha_g, after.v_g, BoundaryTag::WallLeft) +
                       boundary_flux(after.alpha_g, after.v_g, BoundaryTag::WallRight);
  double fixed_rows = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (fixed[i]) {
      fixed_rows += r[i];
    } else if (ctx.config.bounded && (after.alpha_g[i] <= 0.0 || after.alpha_g[i] >= 1.0)) {
      m.bound_source += r[i];
    }
  }
  m.inflow = fixed_rows - other;
  m.residual = m.storage + m.outflow - m.inflow - m.bound_source;
  const double scale =
      std::max({std::abs(m.storage), std::abs(m.outflow), std::abs(m.inflow), std::abs(m.bound_source)});
  m.relative = scale > 0.0 ? std::abs(m.residual) / scale : 0.0;
  return m;
}

SeriesRow make_series_row(const State& state, const StepReport& report, const StepContext& ctx) {
  SeriesRow row;
  row.t_seconds = state.t_tilde * ctx.groups.t_s;
  row.dt_seconds = report.dt_used * ctx.groups.t_s;
  row.holdup = gas_holdup(state.alpha_g);
  const auto a = state.alpha_g.values();
  row.min_alpha_g = *std::min_element(a.begin(), a.end());
  row.max_alpha_g = *std::max_element(a.begin(), a.end());
  const SlipStats s = slip_and_reynolds(state, ctx.config.props, ctx.config.scales, ctx.config.slip_alpha_floor);
  row.slip_velocity_avg_mps = s.slip_mps;
  row.bubble_reynolds_avg = s.bubble_reynolds;
  row.accepted = report.accepted;
  return row;
}

namespace {

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%06d.vtk", index);
  return buf;
}

} // namespace

RunRecord run(const CaseConfig& config, const StepObserver& observer) {
  const StepContext ctx = StepContext::build(config);
  const double t_s = ctx.groups.t_s;
  const double t_end = config.t_end / t_s;
  const double dt_min = config.dt_min / t_s, dt_max = config.dt_max / t_s;
  const bool files = !config.output_dir.empty();
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  const std::string series = (dir / "series.csv").string();

  RunRecord rec;
  State state = initial_state(ctx.disc, config);
  int last_snap_step = -1;
  const auto snapshot = [&](const State& s) {
    if (!files || last_snap_step == rec.accepted_steps) return;
    write_snapshot(s, (dir / snapshot_name(rec.accepted_steps)).string());
    last_snap_step = rec.accepted_steps;
    ++rec.snapshots;
  };
  const auto record = [&](const SeriesRow& row) {
    rec.series.push_back(row);
    if (files) write_timeseries_row(row, series);
  };

  if (files) {
    fs::create_directories(dir);
    write_timeseries_header(series);
  }
  StepReport initial;
  initial.accepted = true;
  record(make_series_row(state, initial, ctx));
  snapshot(state);

  double dt = std::clamp(config.dt_initial / t_s, dt_min, dt_max);
  double next_snap = config.snapshot_interval > 0.0 ? config.snapshot_interval / t_s : 1e300;
  try {
    while (state.t_tilde < t_end * (1.0 - 1e-12)) {
      const double dt_try = std::min(dt, t_end - state.t_tilde);
      StepReport report;
      const TentativeVelocities tv = tentative_velocities(state, dt_try, ctx, true);
      report.local_error_estimate = tv.error;
      report.tentative_iterations = tv.iterations;
      report.dt_used = dt_try;
      const DtDecision dec = adapt_dt(tv.error, config.tol_step, dt_try, dt_min, dt_max);
      if (!dec.accept) {
        ++rec.rejected_steps;
        if (config.log_rejected) {
          SeriesRow row = make_series_row(state, report, ctx);
          row.accepted = false;
          record(row);
        }
        if (observer) observer(state, report);
        dt = dec.dt_next;
        continue;
      }
      report.accepted = true;
      state = complete_step(state, tv, dt_try, ctx, report);
      ++rec.accepted_steps;
      // a step shortened to land on t_end should not shrink the next one
      dt = dt_try < dt ? std::max(dt, dec.dt_next) : dec.dt_next;
      record(make_series_row(state, report, ctx));
      if (observer) observer(state, report);
      if (state.t_tilde >= next_snap * (1.0 - 1e-12)) {
        snapshot(state);
        while (next_snap <= state.t_tilde * (1.0 + 1e-12)) next_snap += config.snapshot_interval / t_s;
      }
    }
  } catch (...) {
    snapshot(state);
    throw;
  }
  snapshot(state);
  rec.final_state = std::move(state);
  return rec;
}

} // namespace tfm
