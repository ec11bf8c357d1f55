#include "mfda/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mfda {

namespace {

QuadratureRule compute_rule(int n) {
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  const QuadratureRule& ref = gauss_legendre(n);
  QuadratureRule r;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(c + h * ref.nodes[i]);
    r.weights.push_back(h * ref.weights[i]);
  }
  return r;
}

QuadratureRule composite_gauss(const std::vector<double>& breaks, int n) {
  QuadratureRule r;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    QuadratureRule piece = gauss_legendre(n, breaks[i], breaks[i + 1]);
    r.nodes.insert(r.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    r.weights.insert(r.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return r;
}

}  // namespace mfda
