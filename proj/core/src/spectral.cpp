#include "mfda/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace mfda {

namespace {

struct Plans {
  int n = 0;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
Plans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Plans>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<Plans>();
    slot->n = n;
    const int h = n / 2 + 1;
    double* re = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    fftw_complex* co = fftw_alloc_complex(static_cast<std::size_t>(n) * h);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->r2c = fftw_plan_dft_r2c_2d(n, n, re, co, flags);
    slot->c2r = fftw_plan_dft_c2r_2d(n, n, co, re, flags);
    fftw_free(re);
    fftw_free(co);
  }
  return *slot;
}

void check_size(const Grid& g, std::size_t got, const char* what) {
  if (got != g.size())
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(g.size()) +
                                " samples, got " + std::to_string(got));
}

void check_level(const Grid& g, int level) {
  if (level < 0) throw std::invalid_argument("sobolev level must be non-negative");
  if (level > g.dealias_cutoff())
    throw ResolutionError("sobolev level " + std::to_string(level) + " exceeds resolvable order " +
                          std::to_string(g.dealias_cutoff()) + " on n=" + std::to_string(g.n()));
}

void check_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

}  // namespace

Grid::Grid(int n) : n_(n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 4");
}

SpectralField::SpectralField(const Grid& grid) : grid_(grid), c_(grid.size(), Complex(0.0, 0.0)) {}

SpectralField SpectralField::from_physical(const Grid& grid, std::span<const double> values) {
  SpectralField f(grid);
  transform(grid, Direction::Forward, values, f.c_);
  f.c_[0] = 0.0;
  return f;
}

std::vector<double> SpectralField::to_physical() const {
  std::vector<double> out(grid_.size());
  inverse_transform(grid_, c_, out);
  return out;
}

int SpectralField::bandwidth(double tol) const {
  const int n = grid_.n();
  double cmax = 0.0;
  for (const auto& c : c_) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return 0;
  int band = 0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (std::abs(at(ix, iy)) > tol * cmax)
        band = std::max({band, std::abs(grid_.wavenumber(ix)), std::abs(grid_.wavenumber(iy))});
  return band;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_same(grid_, o.grid_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : c_) c *= s;
  return *this;
}

VectorField::VectorField(SpectralField a, SpectralField b) : u(std::move(a)), v(std::move(b)) {
  check_same(u.grid(), v.grid());
}

VectorField& VectorField::operator+=(const VectorField& o) {
  u += o.u;
  v += o.v;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  u -= o.u;
  v -= o.v;
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  u *= s;
  v *= s;
  return *this;
}

void transform(const Grid& grid, Direction dir, std::span<const double> physical,
               std::span<Complex> spectral) {
  if (dir == Direction::Inverse) {
    throw std::invalid_argument("use inverse_transform for spectral -> physical");
  }
  check_size(grid, physical.size(), "transform input");
  check_size(grid, spectral.size(), "transform output");
  const int n = grid.n();
  const int h = n / 2 + 1;
  Plans& p = plans_for(n);
  std::vector<Complex> half(static_cast<std::size_t>(n) * h);
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(physical.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < h; ++ix) spectral[iy * n + ix] = half[iy * h + ix] * scale;
    for (int ix = h; ix < n; ++ix) {
      const int jy = (n - iy) % n;
      spectral[iy * n + ix] = std::conj(half[jy * h + (n - ix)]) * scale;
    }
  }
}

void inverse_transform(const Grid& grid, std::span<const Complex> spectral, std::span<double> physical) {
  check_size(grid, spectral.size(), "inverse transform input");
  check_size(grid, physical.size(), "inverse transform output");
  const int n = grid.n();
  const int h = n / 2 + 1;
  Plans& p = plans_for(n);
  std::vector<Complex> half(static_cast<std::size_t>(n) * h);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < h; ++ix) half[iy * h + ix] = spectral[iy * n + ix];
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(half.data()), physical.data());
}

SpectralField derivative(const SpectralField& f, int ax, int ay) {
  const Grid& g = f.grid();
  const int n = g.n();
  SpectralField out(g);
  std::vector<Complex> mx(n), my(n);
  auto multiplier = [&](int i, int order) {
    if (order == 0) return Complex(1.0, 0.0);
    if (g.is_nyquist(i) && order % 2 == 1) return Complex(0.0, 0.0);
    return std::pow(Complex(0.0, g.wavenumber(i)), order);
  };
  for (int i = 0; i < n; ++i) {
    mx[i] = multiplier(i, ax);
    my[i] = multiplier(i, ay);
  }
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) out.at(ix, iy) = f.at(ix, iy) * mx[ix] * my[iy];
  return out;
}

VectorField leray(const VectorField& w) {
  const Grid& g = w.grid();
  const int n = g.n();
  VectorField out(g);
  for (int iy = 0; iy < n; ++iy) {
    const double ky = g.wavenumber(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = g.wavenumber(ix);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const Complex a = w.u.at(ix, iy);
      const Complex b = w.v.at(ix, iy);
      const Complex dot = (kx * a + ky * b) / k2;
      out.u.at(ix, iy) = a - kx * dot;
      out.v.at(ix, iy) = b - ky * dot;
    }
  }
  return out;
}

double divergence_residual(const VectorField& w) {
  const Grid& g = w.grid();
  const int n = g.n();
  double div = 0.0, amp = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const Complex a = w.u.at(ix, iy), b = w.v.at(ix, iy);
      div = std::max(div, std::abs(static_cast<double>(g.wavenumber(ix)) * a + static_cast<double>(g.wavenumber(iy)) * b));
      amp = std::max({amp, std::abs(a), std::abs(b)});
    }
  return amp > 0.0 ? div / amp : 0.0;
}

void dealias(SpectralField& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  const int kc = g.dealias_cutoff();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (std::abs(g.wavenumber(ix)) > kc || std::abs(g.wavenumber(iy)) > kc || g.is_nyquist(ix) ||
          g.is_nyquist(iy))
        f.at(ix, iy) = 0.0;
}

void dealias(VectorField& w) {
  dealias(w.u);
  dealias(w.v);
}

double multi_index_weight(double kx, double ky, int level) {
  double s = 0.0;
  const double x2 = kx * kx, y2 = ky * ky;
  for (int a = 0; a <= level; ++a) s += std::pow(x2, a) * std::pow(y2, level - a);
  return s;
}

double sobolev_norm(const SpectralField& f, int level) {
  const Grid& g = f.grid();
  check_level(g, level);
  const int n = g.n();
  double acc = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double ky = g.wavenumber(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double kx = g.wavenumber(ix);
      acc += multi_index_weight(kx, ky, level) * std::norm(f.at(ix, iy));
    }
  }
  return kTwoPi * std::sqrt(acc);
}

double sobolev_norm(const VectorField& w, int level) {
  const double a = sobolev_norm(w.u, level), b = sobolev_norm(w.v, level);
  return std::sqrt(a * a + b * b);
}

double sobolev_norm_full(const SpectralField& f, int level) {
  double s = 0.0;
  for (int l = 0; l <= level; ++l) s += std::pow(sobolev_norm(f, l), 2);
  return std::sqrt(s);
}

double sobolev_norm_full(const VectorField& w, int level) {
  double s = 0.0;
  for (int l = 0; l <= level; ++l) s += std::pow(sobolev_norm(w, l), 2);
  return std::sqrt(s);
}

double l2_inner(const VectorField& a, const VectorField& b) {
  check_same(a.grid(), b.grid());
  double s = 0.0;
  const auto au = a.u.coeffs(), av = a.v.coeffs(), bu = b.u.coeffs(), bv = b.v.coeffs();
  for (std::size_t i = 0; i < au.size(); ++i)
    s += (au[i] * std::conj(bu[i])).real() + (av[i] * std::conj(bv[i])).real();
  return kTwoPi * kTwoPi * s;
}

double DissipationSymbol::operator()(double k2) const {
  double l = nu * k2;
  if (gamma > 0.0) l += gamma * std::pow(k2, p + 1.0);
  return l;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace mfda
