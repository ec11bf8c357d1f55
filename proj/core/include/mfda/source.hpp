#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mfda/spectral.hpp"

namespace mfda {

// A linear functional acting on one coordinate of a function on the circle.
struct AxisFunctional {
  enum class Kind { Point, Average, Fourier };
  Kind kind = Kind::Point;
  double a = 0.0;  // point location, or interval start
  double b = 0.0;  // interval end
  int order = 0;   // derivative order (Point only)
  double kappa = 0.0;

  static AxisFunctional point(double x, int order = 0) { return {Kind::Point, x, x, order, 0.0}; }
  // (1/(b-a)) int_a^b f
  static AxisFunctional average(double a, double b) { return {Kind::Average, a, b, 0, 0.0}; }
  // (1/(b-a)) int_a^b f(x) exp(-i kappa (x-a))
  static AxisFunctional fourier(double a, double b, double kappa) { return {Kind::Fourier, a, b, 0, kappa}; }

  // Action on exp(i k x).
  Complex kernel(double k) const;
  bool operator==(const AxisFunctional&) const = default;
};

// Outer product request: result(i, j) = (xs[i] (x) ys[j]) phi.
struct SampleRequest {
  std::vector<AxisFunctional> xs;
  std::vector<AxisFunctional> ys;
};

class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual std::vector<Eigen::MatrixXcd> sample(std::span<const SampleRequest> requests) const = 0;
  Eigen::MatrixXcd sample(const SampleRequest& request) const;
};

// Precomputed separable evaluation for a fixed request list and band.
// Exact for fields supported on |k|_inf <= band.
class SeparableSampler {
 public:
  SeparableSampler(std::vector<SampleRequest> requests, int band);

  std::vector<Eigen::MatrixXcd> run(const SpectralField& f) const;
  int band() const { return band_; }
  const std::vector<SampleRequest>& requests() const { return requests_; }

 private:
  std::vector<SampleRequest> requests_;
  int band_;
  Eigen::MatrixXcd ay_;  // (2K+1) x unique y functionals
  std::vector<Eigen::MatrixXcd> ax_;
  std::vector<std::vector<int>> ycols_;
};

class SpectralSource final : public FieldSource {
 public:
  // band < 0 uses the field bandwidth (Nyquist excluded).
  explicit SpectralSource(const SpectralField& f, int band = -1);
  using FieldSource::sample;
  std::vector<Eigen::MatrixXcd> sample(std::span<const SampleRequest> requests) const override;
  const SpectralField& field() const { return field_; }
  int band() const { return band_; }

 private:
  SpectralField field_;
  int band_;
};

// f(x, y, ax, ay) returns d^ax_x d^ay_y f at (x, y). Averages and Fourier
// functionals use composite Gauss-Legendre quadrature.
class AnalyticSource final : public FieldSource {
 public:
  using Function = std::function<double(double, double, int, int)>;
  explicit AnalyticSource(Function f, int points_per_panel = 12, double panel_width = 0.5);
  using FieldSource::sample;
  std::vector<Eigen::MatrixXcd> sample(std::span<const SampleRequest> requests) const override;
  double operator()(double x, double y, int ax = 0, int ay = 0) const { return f_(x, y, ax, ay); }

 private:
  Function f_;
  int points_;
  double panel_;
};

AnalyticSource constant_source(double c);
// Product of univariate polynomials px(x) * py(y), coefficients in increasing degree.
AnalyticSource polynomial_source(std::vector<double> px, std::vector<double> py);

// Random real mean-free field with |k|_inf <= band and amplitudes ~ (1+|k|^2)^(-decay/2).
SpectralField random_field(const Grid& grid, int band, unsigned long long seed, double decay = 0.0);

}  // namespace mfda
