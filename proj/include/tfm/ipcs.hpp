#pragma once

#include "tfm/caseio.hpp"
#include "tfm/forms.hpp"
#include "tfm/physics.hpp"
#include "tfm/state.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tfm {

/// Fixed data shared by every step of one simulation. Times inside are
/// dimensionless unless the name says otherwise.
struct StepContext {
  Discretization disc;
  DimensionlessGroups groups;
  CaseConfig config;
  ClosureInputs closures;

  static StepContext build(const CaseConfig& config);
  static StepContext build(const CaseConfig& config, std::shared_ptr<const Mesh> mesh);
};

/// Boundary data for every sub-step at dimensionless time t.
struct BoundaryConditions {
  DirichletData v_l;
  DirichletData v_g;
  DirichletData alpha_g;
  std::vector<int> pressure; ///< dofs with dP = 0
};

BoundaryConditions boundary_conditions(const StepContext& ctx, double t_tilde);

struct StepReport {
  double dt_used = 0.0; ///< dimensionless
  double local_error_estimate = 0.0;
  bool accepted = false;
  int tentative_iterations = 0;
  int pressure_iterations = 0;
  int update_iterations = 0;
  int alpha_iterations = 0; ///< linear iterations (unbounded mode)
  int vi_iterations = 0;
  double min_alpha_g = 0.0;
  double max_alpha_g = 0.0;
};

/// Euler tentative velocities and the Heun-vs-Euler error estimate.
struct TentativeVelocities {
  FeField v_l;
  FeField v_g;
  double error = 0.0;
  int iterations = 0;
};

TentativeVelocities tentative_velocities(const State& state, double dt, const StepContext& ctx,
                                         bool with_error = true);

/// Pressure correction, velocity update and alpha update after the
/// tentative velocities are known.
State complete_step(const State& state, const TentativeVelocities& tentative, double dt,
                    const StepContext& ctx, StepReport& report);

/// One full step. `accepted` reports error <= tol_step; the new state is
/// returned either way.
std::pair<State, StepReport> step(const State& state, double dt, const StepContext& ctx);

/// P1 field ln(max(alpha, epsilon)).
FeField log_gradient_field(const FeField& alpha, double epsilon = 1e-5);

double estimate_local_error(const State& state, double dt, const StepContext& ctx);

struct DtDecision {
  double dt_next = 0.0;
  bool accept = false;
};

/// Step-size controller; dt_min/dt_max in the same units as dt.
DtDecision adapt_dt(double error, double tol_step, double dt, double dt_min, double dt_max);

/// Discrete conservation of the alpha update over one step.
struct MassBalance {
  double storage = 0.0;       ///< d/dt of the alpha integral
  double outflow = 0.0;       ///< outlet flux of alpha v_g
  double inflow = 0.0;        ///< consistent flux through the Dirichlet boundary
  double inlet_flux = 0.0;    ///< plain inlet boundary integral, for reference
  double bound_source = 0.0;  ///< mass added by the bound constraints
  double residual = 0.0;      ///< storage + outflow - inflow - bound_source
  double relative = 0.0;      ///< residual / max(|storage|, |outflow|, |inflow|)
};

MassBalance alpha_mass_balance(const State& before, const State& after, double dt,
                               const StepContext& ctx);

struct RunRecord {
  std::vector<SeriesRow> series; ///< accepted and (optionally) rejected steps
  State final_state;
  int accepted_steps = 0;
  int rejected_steps = 0;
  int snapshots = 0;
};

using StepObserver = std::function<void(const State&, const StepReport&)>;

/// Advance the default case from its initial state to t_end, writing
/// series.csv and snap_XXXXXX.vtk into config.output_dir when set.
RunRecord run(const CaseConfig& config, const StepObserver& observer = {});

SeriesRow make_series_row(const State& state, const StepReport& report, const StepContext& ctx);

} // namespace tfm
