#pragma once

#include "tfm/linalg.hpp"

namespace tfm {

/// Box-constrained variational inequality with affine residual F(x) = A x - b:
/// find l <= x <= u such that for every i either x_i = l_i and F_i >= 0,
/// x_i = u_i and F_i <= 0, or F_i = 0.
struct BoxVIProblem {
  SparseMatrix A;
  Vector b;
  Vector lower;
  Vector upper;
  Vector x0; ///< optional initial guess (empty means the projection of 0)

  /// Throws InvalidArgument on size mismatches or lower > upper.
  void validate() const;
};

/// Worst violation of each of the three complementarity cases.
struct VIConditions {
  double lower = 0.0;    ///< max(-r_i) over x_i = l_i
  double upper = 0.0;    ///< max(r_i) over x_i = u_i
  double inactive = 0.0; ///< max |r_i| over l_i < x_i < u_i
  /// x outside [l, u] by more than zero, as max distance
  double infeasibility = 0.0;

  double worst() const;
  bool satisfied(double tol) const { return worst() <= tol; }
};

VIConditions check_vi_conditions(std::span<const double> x, const SparseMatrix& A,
                                 std::span<const double> b, std::span<const double> lower,
                                 std::span<const double> upper);

struct VIResult {
  Vector x;
  int iterations = 0;
  VIConditions conditions;
};

/// Reduced-space active-set method. The returned x lies in [l, u] exactly.
/// Throws NonConvergence at the iteration limit carrying the worst violation.
VIResult solve_box_vi(const BoxVIProblem& problem, double tol = 1e-10, int max_iter = 200);

} // namespace tfm
