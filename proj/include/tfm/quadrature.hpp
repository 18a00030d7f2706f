#pragma once

#include <array>
#include <vector>

namespace tfm {

/// Points and weights on the reference triangle {(x, y): x, y >= 0, x + y <= 1}.
struct QuadratureRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Six-point rule exact for polynomials of total degree 4.
const QuadratureRule& triangle_degree4();

/// Gauss-Legendre rule on [0, 1] with n points (n in 1..3).
QuadratureRule gauss_line(int n);

} // namespace tfm
