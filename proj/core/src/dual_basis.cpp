#include "mfda/dual_basis.hpp"

#include <cmath>
#include <stdexcept>

#include "mfda/jet.hpp"
#include "mfda/quadrature.hpp"

namespace mfda {

namespace {

double poly_eval(const Eigen::VectorXd& c, double x) {
  double s = 0.0;
  for (Eigen::Index i = c.size() - 1; i >= 0; --i) s = s * x + c[i];
  return s;
}

double patch_integral(const Eigen::VectorXd& c, int patch, const QuadratureRule& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * poly_eval(c, patch + 0.5 + 0.5 * q.nodes[i]);
  return 0.5 * s;
}

}  // namespace

DualBasisVolPoly build_volpoly_dual_basis(int m) {
  if (m < 1) throw std::invalid_argument("dual basis degree must be >= 1");
  if (m > 8) throw std::invalid_argument("dual basis refused for m > 8: Gram matrix too ill-conditioned");
  DualBasisVolPoly b;
  b.m = m;
  b.M.resize(m, m);
  const QuadratureRule& q = gauss_legendre(m + 1);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd mono = Eigen::VectorXd::Zero(m);
      mono[j] = 1.0;
      b.M(k, j) = patch_integral(mono, k, q);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b.M);
  if (!lu.isInvertible()) throw std::runtime_error("volume functionals are not unisolvent");
  b.det = lu.determinant();
  b.Minv = lu.inverse();
  return b;
}

double superfactorial_determinant(int m) {
  double p = 1.0;
  for (int k = 1; k <= m; ++k)
    for (int l = 1; l < k; ++l) p *= (k - l);
  return p;
}

double stated_volpoly_determinant(int m) { return superfactorial_determinant(m) / factorial(m); }

Biorthogonality check_biorthogonality(const DualBasisVolPoly& b) {
  Biorthogonality r;
  const QuadratureRule& q = gauss_legendre(b.m + 2);
  Eigen::MatrixXd s(b.m, b.m);
  for (int beta = 0; beta < b.m; ++beta)
    for (int alpha = 0; alpha < b.m; ++alpha) {
      s(beta, alpha) = patch_integral(b.theta(alpha), beta, q);
      r.max_error_1d = std::max(r.max_error_1d, std::abs(s(beta, alpha) - (alpha == beta ? 1.0 : 0.0)));
    }
  // Tensor functionals on unit squares, evaluated by 2D Gauss quadrature of xi_alpha.
  for (int b1 = 0; b1 < b.m; ++b1)
    for (int b2 = 0; b2 < b.m; ++b2)
      for (int a1 = 0; a1 < b.m; ++a1)
        for (int a2 = 0; a2 < b.m; ++a2) {
          double v = 0.0;
          for (std::size_t i = 0; i < q.nodes.size(); ++i)
            for (std::size_t j = 0; j < q.nodes.size(); ++j)
              v += 0.25 * q.weights[i] * q.weights[j] * poly_eval(b.theta(a1), b1 + 0.5 + 0.5 * q.nodes[i]) *
                   poly_eval(b.theta(a2), b2 + 0.5 + 0.5 * q.nodes[j]);
          const double d = (a1 == b1 && a2 == b2) ? 1.0 : 0.0;
          r.max_error_2d = std::max(r.max_error_2d, std::abs(v - d));
        }
  return r;
}

}  // namespace mfda
