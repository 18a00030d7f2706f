#include "tfm/quadrature.hpp"

#include "tfm/errors.hpp"

#include <cmath>

namespace tfm {

const QuadratureRule& triangle_degree4() {
  static const QuadratureRule rule = [] {
    // Dunavant, degree 4
    constexpr double a = 0.445948490915965;
    constexpr double b = 0.091576213509771;
    constexpr double wa = 0.223381589678011 / 2.0;
    constexpr double wb = 0.109951743655322 / 2.0;
    QuadratureRule r;
    r.points = {{a, a}, {1.0 - 2.0 * a, a}, {a, 1.0 - 2.0 * a},
                {b, b}, {1.0 - 2.0 * b, b}, {b, 1.0 - 2.0 * b}};
    r.weights = {wa, wa, wa, wb, wb, wb};
    r.degree = 4;
    return r;
  }();
  return rule;
}

QuadratureRule gauss_line(int n) {
  QuadratureRule r;
  switch (n) {
  case 1:
    r.points = {{0.5, 0.0}};
    r.weights = {1.0};
    r.degree = 1;
    break;
  case 2: {
    const double d = 0.5 / std::sqrt(3.0);
    r.points = {{0.5 - d, 0.0}, {0.5 + d, 0.0}};
    r.weights = {0.5, 0.5};
    r.degree = 3;
    break;
  }
  case 3: {
    const double d = 0.5 * std::sqrt(0.6);
    r.points = {{0.5 - d, 0.0}, {0.5, 0.0}, {0.5 + d, 0.0}};
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    r.degree = 5;
    break;
  }
  default:
    throw InvalidArgument("gauss_line supports 1 to 3 points");
  }
  return r;
}

} // namespace tfm
