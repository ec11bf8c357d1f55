#include "mfda/polynomial.hpp"

#include <cmath>

namespace mfda {

namespace {

// Values of d^a/du^a u^r for r = 0..deg at u, per derivative order a.
Eigen::MatrixXd power_derivs(double u, int deg, int amax) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(amax + 1, deg + 1);
  for (int r = 0; r <= deg; ++r)
    for (int a = 0; a <= std::min(amax, r); ++a) {
      double f = 1.0;
      for (int j = 0; j < a; ++j) f *= (r - j);
      m(a, r) = f * std::pow(u, r - a);
    }
  return m;
}

}  // namespace

double TensorPolynomial::eval(double X, double Y, int ax, int ay) const {
  const int dx = static_cast<int>(c.rows()) - 1, dy = static_cast<int>(c.cols()) - 1;
  if (ax > dx || ay > dy) return 0.0;
  const Eigen::MatrixXd px = power_derivs((X - ox) / lx, dx, ax);
  const Eigen::MatrixXd py = power_derivs((Y - oy) / ly, dy, ay);
  const double v = px.row(ax) * c * py.row(ay).transpose();
  return v / (std::pow(lx, ax) * std::pow(ly, ay));
}

Jet2 TensorPolynomial::jet(double X, double Y, int order) const {
  const int dx = static_cast<int>(c.rows()) - 1, dy = static_cast<int>(c.cols()) - 1;
  const Eigen::MatrixXd px = power_derivs((X - ox) / lx, dx, order);
  const Eigen::MatrixXd py = power_derivs((Y - oy) / ly, dy, order);
  const Eigen::MatrixXd t = px * c * py.transpose();
  Jet2 j(order);
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b)
      j.c[a][b] = t(a, b) / (std::pow(lx, a) * std::pow(ly, b) * factorial(a) * factorial(b));
  return j;
}

double LocalFourier::eval(double X, double Y, int ax, int ay) const {
  Complex s = 0.0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double ph = kx[j] * (X - ox) + ky[j] * (Y - oy);
    s += c[j] * std::pow(Complex(0.0, kx[j]), ax) * std::pow(Complex(0.0, ky[j]), ay) *
         Complex(std::cos(ph), std::sin(ph));
  }
  return s.real();
}

Jet2 LocalFourier::jet(double X, double Y, int order) const {
  Jet2 j(order);
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) j.set_derivative(a, b, eval(X, Y, a, b));
  return j;
}

std::vector<double> poly_from_roots(const std::vector<double>& roots) {
  std::vector<double> p{1.0};
  for (double r : roots) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= r * p[i];
    }
    p = std::move(q);
  }
  return p;
}

}  // namespace mfda
