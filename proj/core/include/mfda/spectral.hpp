#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfda {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform n x n collocation grid on [0, 2pi)^2. Physical samples are stored
// row-major with y as the slow index: value(ix, iy) at [iy * n + ix].
class Grid {
 public:
  explicit Grid(int n);

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  double dx() const { return kTwoPi / n_; }
  double coord(int i) const { return i * dx(); }
  // Largest retained wavenumber under the 2/3 rule.
  int dealias_cutoff() const { return n_ / 3; }
  // Signed wavenumber of storage index i, in [-n/2, n/2).
  int wavenumber(int i) const { return i < (n_ + 1) / 2 ? i : i - n_; }
  int index(int k) const { return k >= 0 ? k : k + n_; }
  bool is_nyquist(int i) const { return n_ % 2 == 0 && i == n_ / 2; }

  bool operator==(const Grid& o) const { return n_ == o.n_; }

 private:
  int n_;
};

// Fourier coefficients of a real, mean-free scalar field on the torus,
// phi(x) = sum_k c_k exp(i k.x). Coefficients are stored for every k on the
// grid at [iy * n + ix].
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid);

  static SpectralField from_physical(const Grid& grid, std::span<const double> values);
  std::vector<double> to_physical() const;

  const Grid& grid() const { return grid_; }
  Complex& at(int ix, int iy) { return c_[static_cast<std::size_t>(iy) * grid_.n() + ix]; }
  const Complex& at(int ix, int iy) const { return c_[static_cast<std::size_t>(iy) * grid_.n() + ix]; }
  Complex& mode(int kx, int ky) { return at(grid_.index(kx), grid_.index(ky)); }
  const Complex& mode(int kx, int ky) const { return at(grid_.index(kx), grid_.index(ky)); }
  std::span<Complex> coeffs() { return c_; }
  std::span<const Complex> coeffs() const { return c_; }

  // Largest |k|_inf carrying a coefficient above tol * max|c|.
  int bandwidth(double tol = 0.0) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  Grid grid_;
  std::vector<Complex> c_;
};

struct VectorField {
  SpectralField u;
  SpectralField v;

  explicit VectorField(const Grid& g) : u(g), v(g) {}
  VectorField(SpectralField a, SpectralField b);

  const Grid& grid() const { return u.grid(); }
  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
};

enum class Direction { Forward, Inverse };

// Forward: physical -> coefficients with 1/n^2 normalization; inverse is the
// plain sum. Sizes must match n*n.
void transform(const Grid& grid, Direction dir, std::span<const double> physical,
               std::span<Complex> spectral);
void inverse_transform(const Grid& grid, std::span<const Complex> spectral,
                       std::span<double> physical);

// Derivative d^ax/dx^ax d^ay/dy^ay. Nyquist modes are dropped for odd orders.
SpectralField derivative(const SpectralField& f, int ax, int ay);

VectorField leray(const VectorField& w);
double divergence_residual(const VectorField& w);

void dealias(SpectralField& f);
void dealias(VectorField& w);

// Homogeneous norm: ||phi||^2 = (2pi)^2 sum_k sum_{|alpha|=l} k^{2 alpha} |c_k|^2.
double sobolev_norm(const SpectralField& f, int level);
double sobolev_norm(const VectorField& w, int level);
// Inhomogeneous: sum of squared homogeneous norms up to level.
double sobolev_norm_full(const SpectralField& f, int level);
double sobolev_norm_full(const VectorField& w, int level);
double l2_inner(const VectorField& a, const VectorField& b);

// Sum over |alpha| = l of k^{2 alpha}, each multi-index once.
double multi_index_weight(double kx, double ky, int level);

// L(k) = nu |k|^2 + gamma |k|^{2(p+1)}.
struct DissipationSymbol {
  double nu = 1.0;
  double gamma = 0.0;
  double p = 0.0;

  double operator()(double k2) const;
  bool hyper() const { return gamma > 0.0; }
};

double max_abs(std::span<const double> values);

}  // namespace mfda
