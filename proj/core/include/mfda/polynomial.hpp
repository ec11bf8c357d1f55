#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mfda/jet.hpp"
#include "mfda/spectral.hpp"

namespace mfda {

// p(X, Y) = sum_{r,s} c(r, s) u^r v^s with u = (X - ox)/lx, v = (Y - oy)/ly.
// X, Y are coordinates in the frame of the owning cell.
struct TensorPolynomial {
  double ox = 0.0, oy = 0.0;
  double lx = 1.0, ly = 1.0;
  Eigen::MatrixXd c;

  double eval(double X, double Y, int ax = 0, int ay = 0) const;
  // Taylor jet at (X, Y) up to total order.
  Jet2 jet(double X, double Y, int order) const;
  int degree() const { return static_cast<int>(std::max(c.rows(), c.cols())) - 1; }
};

// Re sum_j c_j exp(i (kx_j (X - ox) + ky_j (Y - oy))).
struct LocalFourier {
  double ox = 0.0, oy = 0.0;
  std::vector<double> kx, ky;
  Eigen::VectorXcd c;

  double eval(double X, double Y, int ax = 0, int ay = 0) const;
  Jet2 jet(double X, double Y, int order) const;
};

// Output of a local operator: a polynomial or a local Fourier sum.
struct LocalFit {
  enum class Kind { Polynomial, Fourier };
  Kind kind = Kind::Polynomial;
  TensorPolynomial poly;
  LocalFourier fourier;

  double eval(double X, double Y, int ax = 0, int ay = 0) const {
    return kind == Kind::Polynomial ? poly.eval(X, Y, ax, ay) : fourier.eval(X, Y, ax, ay);
  }
  Jet2 jet(double X, double Y, int order) const {
    return kind == Kind::Polynomial ? poly.jet(X, Y, order) : fourier.jet(X, Y, order);
  }
};

// Expand prod_i (t - r_i) into increasing-degree coefficients.
std::vector<double> poly_from_roots(const std::vector<double>& roots);

}  // namespace mfda
