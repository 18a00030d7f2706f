#include "tfm/physics.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tfm {

void FluidProperties::validate() const {
  if (!(rho_g > 0.0) || !(rho_l > 0.0) || !(mu_g > 0.0) || !(mu_l > 0.0) || !(d_b > 0.0) ||
      !(g > 0.0))
    throw InvalidArgument("fluid properties must be strictly positive");
}

void Scales::validate() const {
  if (!(x_s > 0.0) || !(v_s > 0.0) || !(g_s > 0.0) || !(h_ref > 0.0))
    throw InvalidArgument("scales must be strictly positive");
}

DimensionlessGroups make_groups(const FluidProperties& props, const Scales& scales, double C_P) {
  props.validate();
  scales.validate();
  if (C_P < 0.0) throw InvalidArgument("C_P must be nonnegative");
  DimensionlessGroups g;
  g.P_s = props.rho_l * scales.g_s * scales.h_ref;
  g.Eu_l = g.P_s / (props.rho_l * scales.v_s * scales.v_s);
  g.Eu_g = g.P_s / (props.rho_g * scales.v_s * scales.v_s);
  g.Re_l = props.rho_l * scales.v_s * scales.x_s / props.mu_l;
  g.Re_g = props.rho_g * scales.v_s * scales.x_s / props.mu_g;
  g.Fr = scales.v_s / std::sqrt(scales.g_s * scales.x_s);
  g.d_b_tilde = props.d_b / scales.x_s;
  g.g_tilde = props.g / scales.g_s;
  g.rho_ratio = props.rho_l / props.rho_g;
  g.C_P = C_P;
  g.t_s = scales.t_s();
  return g;
}

double drag_coefficient(double re_b) {
  if (!(re_b >= 0.0)) throw InvalidArgument("bubble Reynolds number must be nonnegative");
  if (re_b == 0.0) throw InvalidArgument("drag coefficient is unbounded at Re = 0");
  return std::max(24.0 / re_b * (1.0 + 0.15 * std::pow(re_b, 0.687)), 0.44);
}

double bubble_reynolds(double slip_speed_tilde, const DimensionlessGroups& groups) {
  return groups.Re_l * groups.d_b_tilde * slip_speed_tilde;
}

double drag_exchange_coefficient(double slip_speed_tilde, const DimensionlessGroups& groups) {
  const double speed = std::abs(slip_speed_tilde);
  const double re = bubble_reynolds(speed, groups);
  const double d = groups.d_b_tilde;
  // C_D |v_r| = max(24 (1 + 0.15 Re^0.687) / (Re_l d), 0.44 |v_r|)
  const double viscous = 24.0 * (1.0 + 0.15 * std::pow(re, 0.687)) / (groups.Re_l * d);
  return 0.75 / d * std::max(viscous, 0.44 * speed);
}

double terminal_velocity_balance(const FluidProperties& props) {
  props.validate();
  const double drho = props.rho_l - props.rho_g;
  auto f = [&](double v) {
    const double re = props.rho_l * v * props.d_b / props.mu_l;
    return drag_coefficient(re) - 4.0 * drho * props.g * props.d_b / (3.0 * props.rho_l * v * v);
  };
  double lo = 1e-6, hi = 10.0;
  double flo = f(lo), fhi = f(hi);
  if (!(flo * fhi < 0.0))
    throw BracketError("terminal velocity balance has no sign change on (1e-6, 10) m/s");
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  (void)fhi;
  return 0.5 * (lo + hi);
}

TerminalEstimate clift_terminal_reynolds(const FluidProperties& props) {
  props.validate();
  TerminalEstimate e;
  const double drho = props.rho_l - props.rho_g;
  e.N_D = 4.0 * props.rho_l * drho * props.g * std::pow(props.d_b, 3) /
          (3.0 * props.mu_l * props.mu_l);
  const double l = std::log10(e.N_D);
  e.Re_T = std::pow(10.0, -1.7095 + 1.33438 * l - 0.11591 * l * l);
  e.v_T = e.Re_T * props.mu_l / (props.rho_l * props.d_b);
  return e;
}

Vec2 lift_force(double C_L, double rho_c, double alpha_d, Vec2 v_r, double vorticity_c) {
  // v_r x (omega e_z) = (v_r.y omega, -v_r.x omega)
  const double s = C_L * rho_c * alpha_d;
  return {s * v_r.y * vorticity_c, -s * v_r.x * vorticity_c};
}

Vec2 virtual_mass_force(double C_VM, double rho_c, double alpha_d, Vec2 accel_d, Vec2 accel_c) {
  return (alpha_d * rho_c * C_VM) * (accel_d - accel_c);
}

Vec2 wall_lubrication_force(double C_W, double rho_c, double alpha_d, Vec2 v_r, Vec2 n_wall) {
  const Vec2 tangential = v_r - dot(v_r, n_wall) * n_wall;
  return (-C_W * alpha_d * rho_c * dot(tangential, tangential)) * n_wall;
}

Vec2 optional_force(OptionalForce kind, const ForcePointInputs& in) {
  switch (kind) {
  case OptionalForce::Lift:
    return lift_force(in.coefficient, in.rho_c, in.alpha_d, in.v_r, in.vorticity_c);
  case OptionalForce::VirtualMass:
    return virtual_mass_force(in.coefficient, in.rho_c, in.alpha_d, in.accel_d, in.accel_c);
  case OptionalForce::WallLubrication:
    return wall_lubrication_force(in.coefficient, in.rho_c, in.alpha_d, in.v_r, in.n_wall);
  }
  return {};
}

} // namespace tfm
