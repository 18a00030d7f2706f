#pragma once

#include "tfm/fem.hpp"
#include "tfm/linalg.hpp"
#include "tfm/physics.hpp"
#include "tfm/state.hpp"

#include <vector>

namespace tfm {

enum class Phase { Liquid, Gas };

const char* to_string(Phase phase);

/// Prescribed dof values.
struct DirichletData {
  std::vector<int> dofs;
  Vector values;
};

struct ClosureInputs {
  /// Floor applied to phase fractions before taking logarithms (grad(alpha)/alpha
  /// is evaluated as grad(ln max(alpha, floor))).
  double alpha_floor = 1e-5;
  /// Treat the gas-side drag coefficient implicitly (K^n v_g*) instead of fully
  /// explicitly. The liquid-side drag is always explicit.
  bool implicit_gas_drag = true;
};

struct LinearSystem {
  SparseMatrix A;
  Vector b;
};

/// Explicit load vectors of the tentative-velocity equation, split by term.
/// Each is the integral of the term against every vector P2 test function.
struct TentativeLoads {
  Vector convection;  ///< -<v.grad v, phi>
  Vector pressure;    ///< -Eu <grad P, phi> (+ gas interfacial-pressure gradient)
  Vector gravity;     ///< <g / Fr^2, phi>
  Vector drag;        ///< explicit drag contribution
  Vector interfacial; ///< liquid: -C_P <|v_r|^2 grad ln alpha_l, phi>

  Vector total() const;
};

TentativeLoads tentative_loads(Phase phase, const State& state, const DimensionlessGroups& groups,
                               const ClosureInputs& closures);

/// Pieces of the tentative-velocity system before boundary conditions:
/// lhs * v* = history + loads.total().
struct TentativeParts {
  SparseMatrix lhs;
  Vector history; ///< M v^n / dt minus the explicit half of the viscous term
  TentativeLoads loads;
};

TentativeParts assemble_tentative_parts(Phase phase, const State& state, double dt,
                                        const DimensionlessGroups& groups,
                                        const ClosureInputs& closures);

/// Tentative-velocity system for one phase with Dirichlet rows applied.
LinearSystem assemble_tentative_velocity(Phase phase, const State& state, double dt,
                                         const DimensionlessGroups& groups,
                                         const ClosureInputs& closures, const DirichletData& bc);

/// Poisson system for the pressure increment dP = P^{n+1} - P^n:
/// <sum_q Eu_q alpha_q grad dP, grad phi> = -<div sum_q alpha_q v*_q / dt, phi>,
/// with dP = 0 on `fixed_dofs` (eliminated symmetrically). Throws
/// SingularSystem when `fixed_dofs` is empty.
LinearSystem assemble_pressure_poisson(const State& state, const FeField& v_star_l,
                                       const FeField& v_star_g, double dt,
                                       const DimensionlessGroups& groups,
                                       const std::vector<int>& fixed_dofs);

/// M v^{n+1} = M v* - dt Eu_q <grad dP, phi> with Dirichlet rows applied.
LinearSystem assemble_velocity_update(Phase phase, const FeField& v_star, const FeField& delta_p,
                                      double dt, const DimensionlessGroups& groups,
                                      const DirichletData& bc);

/// SUPG parameter h / (2 |v|) for pure advection, zero below |v| = 1e-10.
double supg_tau(double h, double speed);

/// Phase-fraction update with SUPG test functions phi + tau v.grad(phi):
/// <(a - a^n)/dt, phi'> + <div(a v), phi'> = 0. Dirichlet rows replaced.
LinearSystem assemble_alpha_system(const FeField& alpha_old, const FeField& v_g, double dt,
                                   const DirichletData& bc, bool supg = true);

/// Row residual A a_new - b of the alpha system without boundary rows.
Vector alpha_residual(const FeField& alpha_old, const FeField& alpha_new, const FeField& v_g,
                      double dt, bool supg = true);

/// Outward flux of alpha v through the facets with the given tag (exact for
/// P1 alpha times P2 v).
double boundary_flux(const FeField& alpha, const FeField& v, BoundaryTag tag);

Vec2 outward_normal(const Mesh& mesh, int facet);

} // namespace tfm
