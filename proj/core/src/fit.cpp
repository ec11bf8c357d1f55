#include "mfda/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace mfda {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    r += e * e;
  }
  f.residual = std::sqrt(r / n);
  f.points = static_cast<int>(n);
  return f;
}

LineFit loglog_fit(const std::vector<double>& h, const std::vector<double>& err, double floor) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size() && i < err.size(); ++i)
    if (err[i] > floor && h[i] > 0.0) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(err[i]));
    }
  return fit_line(lx, ly);
}

}  // namespace mfda
