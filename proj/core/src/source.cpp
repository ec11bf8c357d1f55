#include "mfda/source.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "mfda/quadrature.hpp"

namespace mfda {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

Complex expi(double t) { return {std::cos(t), std::sin(t)}; }

using Key = std::tuple<int, double, double, int, double>;

Key key_of(const AxisFunctional& f) { return {static_cast<int>(f.kind), f.a, f.b, f.order, f.kappa}; }

Eigen::MatrixXcd kernel_matrix(const std::vector<AxisFunctional>& fs, int band) {
  Eigen::MatrixXcd m(2 * band + 1, static_cast<Eigen::Index>(fs.size()));
  for (std::size_t j = 0; j < fs.size(); ++j)
    for (int k = -band; k <= band; ++k) m(k + band, static_cast<Eigen::Index>(j)) = fs[j].kernel(k);
  return m;
}

// Quadrature nodes, complex weights and derivative orders for one axis functional.
struct AxisRule {
  std::vector<double> x;
  std::vector<Complex> w;
  int order = 0;
};

AxisRule axis_rule(const AxisFunctional& f, int points, double panel) {
  AxisRule r;
  if (f.kind == AxisFunctional::Kind::Point) {
    r.x = {f.a};
    r.w = {1.0};
    r.order = f.order;
    return r;
  }
  const double len = f.b - f.a;
  if (!(len > 0.0)) throw std::invalid_argument("axis functional interval must have positive length");
  const int panels = std::max(1, static_cast<int>(std::ceil(len / panel)));
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = f.a + len * i / panels;
  QuadratureRule q = composite_gauss(breaks, points);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    Complex w = q.weights[i] / len;
    if (f.kind == AxisFunctional::Kind::Fourier) w *= expi(-f.kappa * (q.nodes[i] - f.a));
    r.x.push_back(q.nodes[i]);
    r.w.push_back(w);
  }
  return r;
}

}  // namespace

Complex AxisFunctional::kernel(double k) const {
  switch (kind) {
    case Kind::Point:
      return std::pow(Complex(0.0, k), order) * expi(k * a);
    case Kind::Average: {
      const double len = b - a;
      return expi(0.5 * k * (a + b)) * sinc(0.5 * k * len);
    }
    case Kind::Fourier: {
      const double len = b - a;
      const double q = k - kappa;
      return expi(k * a + 0.5 * q * len) * sinc(0.5 * q * len);
    }
  }
  return 0.0;
}

Eigen::MatrixXcd FieldSource::sample(const SampleRequest& request) const {
  return sample(std::span<const SampleRequest>(&request, 1)).front();
}

SeparableSampler::SeparableSampler(std::vector<SampleRequest> requests, int band)
    : requests_(std::move(requests)), band_(band) {
  if (band < 0) throw std::invalid_argument("sampler band must be non-negative");
  std::map<Key, int> index;
  std::vector<AxisFunctional> unique;
  for (const auto& r : requests_) {
    std::vector<int> cols;
    for (const auto& f : r.ys) {
      auto [it, inserted] = index.emplace(key_of(f), static_cast<int>(unique.size()));
      if (inserted) unique.push_back(f);
      cols.push_back(it->second);
    }
    ycols_.push_back(std::move(cols));
    ax_.push_back(kernel_matrix(r.xs, band_).transpose());
  }
  ay_ = kernel_matrix(unique, band_);
}

std::vector<Eigen::MatrixXcd> SeparableSampler::run(const SpectralField& f) const {
  const Grid& g = f.grid();
  const int kb = band_;
  if (kb >= g.n() / 2) throw std::invalid_argument("sampler band exceeds grid resolution");
  // c(kx, ky) with rows indexed by kx.
  Eigen::MatrixXcd c(2 * kb + 1, 2 * kb + 1);
  for (int ky = -kb; ky <= kb; ++ky)
    for (int kx = -kb; kx <= kb; ++kx) c(kx + kb, ky + kb) = f.mode(kx, ky);
  const Eigen::MatrixXcd t = c * ay_;
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(requests_.size());
  for (std::size_t r = 0; r < requests_.size(); ++r) {
    Eigen::MatrixXcd tr(t.rows(), static_cast<Eigen::Index>(ycols_[r].size()));
    for (std::size_t j = 0; j < ycols_[r].size(); ++j) tr.col(static_cast<Eigen::Index>(j)) = t.col(ycols_[r][j]);
    out.push_back(ax_[r] * tr);
  }
  return out;
}

SpectralSource::SpectralSource(const SpectralField& f, int band) : field_(f) {
  const int maxband = f.grid().n() / 2 - 1;
  band_ = band < 0 ? std::min(f.bandwidth(), maxband) : std::min(band, maxband);
}

std::vector<Eigen::MatrixXcd> SpectralSource::sample(std::span<const SampleRequest> requests) const {
  SeparableSampler s(std::vector<SampleRequest>(requests.begin(), requests.end()), band_);
  return s.run(field_);
}

AnalyticSource::AnalyticSource(Function f, int points_per_panel, double panel_width)
    : f_(std::move(f)), points_(points_per_panel), panel_(panel_width) {
  if (points_ < 1 || !(panel_ > 0.0)) throw std::invalid_argument("invalid analytic quadrature");
}

std::vector<Eigen::MatrixXcd> AnalyticSource::sample(std::span<const SampleRequest> requests) const {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& r : requests) {
    std::vector<AxisRule> rx, ry;
    for (const auto& f : r.xs) rx.push_back(axis_rule(f, points_, panel_));
    for (const auto& f : r.ys) ry.push_back(axis_rule(f, points_, panel_));
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(r.xs.size()), static_cast<Eigen::Index>(r.ys.size()));
    for (std::size_t i = 0; i < rx.size(); ++i)
      for (std::size_t j = 0; j < ry.size(); ++j) {
        Complex s = 0.0;
        for (std::size_t a = 0; a < rx[i].x.size(); ++a)
          for (std::size_t b = 0; b < ry[j].x.size(); ++b)
            s += rx[i].w[a] * ry[j].w[b] * f_(rx[i].x[a], ry[j].x[b], rx[i].order, ry[j].order);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      }
    out.push_back(std::move(m));
  }
  return out;
}

AnalyticSource constant_source(double c) {
  return AnalyticSource([c](double, double, int ax, int ay) { return ax == 0 && ay == 0 ? c : 0.0; });
}

AnalyticSource polynomial_source(std::vector<double> px, std::vector<double> py) {
  auto eval = [](const std::vector<double>& p, double x, int d) {
    double s = 0.0;
    for (int i = static_cast<int>(p.size()) - 1; i >= d; --i) {
      double c = p[i];
      for (int j = 0; j < d; ++j) c *= (i - j);
      s = s * x + c;
    }
    return s;
  };
  return AnalyticSource([=](double x, double y, int ax, int ay) { return eval(px, x, ax) * eval(py, y, ay); });
}

SpectralField random_field(const Grid& grid, int band, unsigned long long seed, double decay) {
  if (band < 1 || band >= grid.n() / 2) throw std::invalid_argument("random field band out of range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(grid);
  for (int ky = -band; ky <= band; ++ky)
    for (int kx = -band; kx <= band; ++kx) {
      // Half plane: (ky > 0) or (ky == 0 and kx > 0); the rest by symmetry.
      if (!(ky > 0 || (ky == 0 && kx > 0))) continue;
      const double amp = std::pow(1.0 + kx * kx + ky * ky, -0.5 * decay);
      const double re = normal(rng), im = normal(rng);
      const Complex c = amp * Complex(re, im);
      f.mode(kx, ky) = c;
      f.mode(-kx, -ky) = std::conj(c);
    }
  return f;
}

}  // namespace mfda
