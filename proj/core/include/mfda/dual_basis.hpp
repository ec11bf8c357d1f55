#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mfda {

// Unit patches [j-1, j], j = 1..m, with functionals sigma_{j-1}(f) = int_{j-1}^{j} f
// and monomials x^0..x^{m-1}. M(k, j) = sigma_k(x^j) (0-based), theta_j = sum_i Minv(i, j) x^i.
struct DualBasisVolPoly {
  int m = 0;
  Eigen::MatrixXd M;
  Eigen::MatrixXd Minv;
  double det = 0.0;

  // Coefficients (increasing degree) of the 1D dual function theta_j.
  Eigen::VectorXd theta(int j) const { return Minv.col(j); }
};

DualBasisVolPoly build_volpoly_dual_basis(int m);

// (1/m!) prod_{1<=l<k<=m} (k - l), as stated for the determinant.
double stated_volpoly_determinant(int m);
// prod_{1<=l<k<=m} (k - l).
double superfactorial_determinant(int m);

struct Biorthogonality {
  double max_error_1d = 0.0;
  double max_error_2d = 0.0;
};

// sigma_beta(xi_alpha) - delta by Gauss quadrature, 1D and tensor 2D.
Biorthogonality check_biorthogonality(const DualBasisVolPoly& basis);

}  // namespace mfda
