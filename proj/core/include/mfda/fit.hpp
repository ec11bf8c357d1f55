#pragma once

#include <vector>

namespace mfda {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit residuals
  int points = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Slope of log(err) against log(h), skipping err below floor.
LineFit loglog_fit(const std::vector<double>& h, const std::vector<double>& err, double floor = 1e-12);

}  // namespace mfda
