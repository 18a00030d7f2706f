#pragma once

#include "tfm/mesh.hpp"

namespace tfm {

/// Physical properties of the gas-liquid pair (SI units).
struct FluidProperties {
  double rho_g = 10.0;   ///< kg/m^3
  double rho_l = 1000.0; ///< kg/m^3
  double mu_g = 2e-5;    ///< Pa s
  double mu_l = 5e-3;    ///< Pa s
  double d_b = 1e-3;     ///< bubble diameter, m
  double g = 9.81;       ///< m/s^2

  void validate() const;
  bool operator==(const FluidProperties&) const = default;
};

/// Reference scales used for nondimensionalization. The pressure scale is
/// P_s = rho_l g_s h_ref and the reference pressure P_0 is zero.
struct Scales {
  double x_s = 0.05;   ///< m
  double v_s = 0.0616; ///< m/s
  double g_s = 9.81;   ///< m/s^2
  double h_ref = 0.1;  ///< m

  /// Time scale x_s / v_s (seconds).
  double t_s() const { return x_s / v_s; }
  void validate() const;
  bool operator==(const Scales&) const = default;
};

struct DimensionlessGroups {
  double Eu_l = 0.0;
  double Eu_g = 0.0;
  double Re_l = 0.0;
  double Re_g = 0.0;
  double Fr = 0.0;
  double d_b_tilde = 0.0;
  double g_tilde = 1.0;   ///< g / g_s
  double rho_ratio = 0.0; ///< rho_l / rho_g
  double C_P = 0.0;
  double P_s = 0.0; ///< Pa
  double t_s = 0.0; ///< s
};

DimensionlessGroups make_groups(const FluidProperties& props, const Scales& scales, double C_P);

/// Schiller-Naumann: max(24/Re (1 + 0.15 Re^0.687), 0.44). Re must be > 0.
double drag_coefficient(double re_b);

/// Bubble Reynolds number rho_l |v_r| d_b / mu_l from a scaled slip speed.
double bubble_reynolds(double slip_speed_tilde, const DimensionlessGroups& groups);

/// Scaled drag exchange coefficient K = (3/4) (C_D / d_b~) |v_r~|.
///
/// The viscous branch is rewritten as 18 (1 + 0.15 Re^0.687) / (Re_l d_b~^2),
/// which is finite at zero slip, so K v_r is continuous everywhere.
double drag_exchange_coefficient(double slip_speed_tilde, const DimensionlessGroups& groups);

/// Terminal velocity (m/s) from the drag/buoyancy balance
/// C_D(Re(v)) = 4 drho g d_b / (3 rho_l v^2), bisection on (1e-6, 10) m/s.
double terminal_velocity_balance(const FluidProperties& props);

struct TerminalEstimate {
  double N_D = 0.0;
  double Re_T = 0.0;
  double v_T = 0.0; ///< m/s
};

/// Rigid-sphere terminal Reynolds correlation (base-10 logs):
/// log Re_T = -1.7095 + 1.33438 log N_D - 0.11591 (log N_D)^2,
/// N_D = 4 rho_l drho g d^3 / (3 mu_l^2).
TerminalEstimate clift_terminal_reynolds(const FluidProperties& props);

// Closures that are evaluated but never coupled into the time stepper.
// All return the momentum transfer density into the continuous phase.

enum class OptionalForce { Lift, VirtualMass, WallLubrication };

/// C_L rho_c alpha_d v_r x (curl v_c); in 2D curl v_c is the scalar vorticity.
Vec2 lift_force(double C_L, double rho_c, double alpha_d, Vec2 v_r, double vorticity_c);

/// alpha_d rho_c C_VM (D_d v_d/Dt - D_c v_c/Dt).
Vec2 virtual_mass_force(double C_VM, double rho_c, double alpha_d, Vec2 accel_d, Vec2 accel_c);

/// -C_W alpha_d rho_c |v_r - (v_r.n_W) n_W|^2 n_W.
Vec2 wall_lubrication_force(double C_W, double rho_c, double alpha_d, Vec2 v_r, Vec2 n_wall);

struct ForcePointInputs {
  double coefficient = 0.0; ///< C_L, C_VM or C_W
  double rho_c = 0.0;
  double alpha_d = 0.0;
  Vec2 v_r{};
  double vorticity_c = 0.0; ///< lift
  Vec2 accel_d{};           ///< virtual mass: D_d v_d / Dt
  Vec2 accel_c{};           ///< virtual mass: D_c v_c / Dt
  Vec2 n_wall{};            ///< wall lubrication
};

Vec2 optional_force(OptionalForce kind, const ForcePointInputs& in);

} // namespace tfm
