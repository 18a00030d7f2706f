#pragma once

#include "tfm/fem.hpp"

#include <memory>

namespace tfm {

/// The mesh with the two spaces every field lives on: P1 for phase fractions
/// and pressure, vector P2 for both phase velocities.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FunctionSpace> scalar;
  std::shared_ptr<const FunctionSpace> vector;

  static Discretization build(std::shared_ptr<const Mesh> mesh);
};

/// Complete scaled solution at one time level.
struct State {
  FeField alpha_g;
  FeField alpha_l;
  FeField v_g;
  FeField v_l;
  FeField p_l;
  double t_tilde = 0.0;

  static State zeros(const Discretization& disc);
};

} // namespace tfm
