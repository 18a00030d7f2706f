#pragma once

#include "tfm/mesh.hpp"
#include "tfm/physics.hpp"
#include "tfm/state.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace tfm {

/// Everything that defines a simulation. All values are dimensional (SI).
struct CaseConfig {
  FluidProperties props;
  Scales scales;
  double C_P = 0.0;
  double alpha_floor = 1e-5; ///< floor inside ln(alpha)
  bool implicit_gas_drag = true;
  bool supg = true;

  int nx = 24;
  int ny = 52;
  DiagonalRule diagonal = DiagonalRule::Alternating;
  double width = 0.05;  ///< m
  double height = 0.1;  ///< m

  bool bounded = true;
  double tol_step = 1e-4;
  double tol_linear = 1e-10;
  double tol_vi = 1e-10;
  int max_linear_iter = 5000;
  int max_vi_iter = 200;
  double dt_initial = 1e-5; ///< s
  double dt_min = 1e-9;     ///< s
  double dt_max = 0.008;    ///< s
  double t_end = 2.5;       ///< s

  double inlet_gas_speed = 0.0616; ///< m/s, peak
  double inlet_alpha = 0.026;      ///< peak
  double ramp_time = 0.625;        ///< s
  double inlet_sigma = 0.1;
  double inlet_half_width = 0.025; ///< m

  std::string output_dir;          ///< empty: no files
  double snapshot_interval = 0.1;  ///< s; <= 0 writes only first and last
  bool log_rejected = true;
  double slip_alpha_floor = 0.005;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  bool operator==(const CaseConfig&) const = default;
};

/// Parse `key = value` lines with optional `[section]` headers and `#`
/// comments. Keys are unique across sections; unknown keys are rejected.
/// Throws ConfigError with a line number or key name.
CaseConfig parse_config(std::string_view text);
CaseConfig load_config(const std::string& path);
/// Apply one `key=value` override.
void apply_override(CaseConfig& config, std::string_view assignment);
/// Canonical text form; parse_config(dump_config(c)) == c.
std::string dump_config(const CaseConfig& config);

struct InletValues {
  double v_g_y = 0.0; ///< m/s
  double alpha_g = 0.0;
};

/// Ramped Gaussian inlet profile at position x (m) and time t (s).
InletValues inlet_profiles(double x, double t, const CaseConfig& config);

/// Mesh in dimensionless coordinates (lengths divided by x_s).
std::shared_ptr<const Mesh> build_mesh(const CaseConfig& config);

/// Quiescent liquid with hydrostatic pressure rho_l g_s (h_ref - y) / P_s.
State initial_state(const Discretization& disc, const CaseConfig& config);

/// Legacy VTK ASCII unstructured grid with point data alpha_g, pressure, v_g, v_l.
void write_snapshot(const State& state, const std::string& path);

struct Snapshot {
  std::vector<Vec2> points;
  std::vector<Cell> cells;
  Vector alpha_g;
  Vector pressure;
  std::vector<Vec2> v_g;
  std::vector<Vec2> v_l;
};

Snapshot read_snapshot(const std::string& path);

struct SeriesRow {
  double t_seconds = 0.0;
  double dt_seconds = 0.0;
  double holdup = 0.0;
  double min_alpha_g = 0.0;
  double max_alpha_g = 0.0;
  double slip_velocity_avg_mps = 0.0;
  double bubble_reynolds_avg = 0.0;
  bool accepted = true;
};

std::string timeseries_header();
std::string format_timeseries_row(const SeriesRow& row);
void write_timeseries_header(const std::string& path);
void write_timeseries_row(const SeriesRow& row, const std::string& path);

} // namespace tfm
