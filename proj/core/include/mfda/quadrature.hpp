#pragma once

#include <vector>

namespace mfda {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);
// Same rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);
// Composite rule: breakpoints b_0 < ... < b_m, n points per interval.
QuadratureRule composite_gauss(const std::vector<double>& breaks, int n);

}  // namespace mfda
