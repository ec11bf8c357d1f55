#include "mfda/nse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mfda/source.hpp"

namespace mfda {

namespace {

void scale_modes(SpectralField& f, const std::vector<double>& s) {
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= s[i];
}

void scale_modes(VectorField& w, const std::vector<double>& s) {
  scale_modes(w.u, s);
  scale_modes(w.v, s);
}

bool finite(const VectorField& w) {
  for (const auto& c : w.u.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  for (const auto& c : w.v.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

VectorField nonlinear_term(const VectorField& u_in) {
  VectorField u = u_in;
  dealias(u);
  const Grid& g = u.grid();
  const SpectralField omega = derivative(u.v, 1, 0) - derivative(u.u, 0, 1);
  const std::vector<double> pu = u.u.to_physical(), pv = u.v.to_physical(), pw = omega.to_physical();
  std::vector<double> a(g.size()), b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    a[i] = -pw[i] * pv[i];
    b[i] = pw[i] * pu[i];
  }
  VectorField out(SpectralField::from_physical(g, a), SpectralField::from_physical(g, b));
  dealias(out);
  return leray(out);
}

ForcingSpec::ForcingSpec(VectorField force, double viscosity, int kmax) : f(leray(force)), nu(viscosity) {
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  grashof = mfda::grashof(f, nu);
  sigma.assign(kmax + 1, 1.0);
  if (grashof > 0.0)
    for (int j = 1; j <= kmax; ++j) sigma[j] = shape_factor(f, j);
}

double grashof(const VectorField& f, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  return sobolev_norm(leray(f), 0) / (nu * nu);
}

double shape_factor(const VectorField& f, int k) {
  const VectorField pf = leray(f);
  const double base = sobolev_norm(pf, 0);
  if (base <= 0.0) throw std::invalid_argument("shape factor of zero forcing");
  return sobolev_norm(pf, k) / base;
}

double absorbing_radius(double sigma_km1, double G, int k) {
  if (k < 1) throw std::invalid_argument("absorbing radius needs k >= 1");
  return std::pow(std::pow(sigma_km1, 1.0 / k) + G, k - 1) * G;
}

VectorField kolmogorov_forcing(const Grid& grid, int kf, double amplitude) {
  if (kf < 1 || kf > grid.dealias_cutoff()) throw ResolutionError("forcing wavenumber not resolved");
  VectorField f(grid);
  f.u.mode(0, kf) = Complex(0.0, -0.5 * amplitude);
  f.u.mode(0, -kf) = Complex(0.0, 0.5 * amplitude);
  return f;
}

VectorField forcing_for_grashof(const Grid& grid, double nu, double G, int kf) {
  const VectorField unit = kolmogorov_forcing(grid, kf, 1.0);
  return (G * nu * nu / sobolev_norm(unit, 0)) * unit;
}

VectorField shell_forcing(const Grid& grid, double nu, double G, int kmin, int kmax, unsigned long long seed) {
  if (kmin < 1 || kmax < kmin) throw std::invalid_argument("bad forcing shell");
  if (kmax > grid.dealias_cutoff()) throw ResolutionError("forcing shell not resolved");
  SpectralField psi = random_field(grid, kmax, seed);
  const int n = grid.n();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int kx = grid.wavenumber(ix), ky = grid.wavenumber(iy);
      const double r = std::sqrt(static_cast<double>(kx * kx + ky * ky));
      if (r < kmin || r > kmax) psi.at(ix, iy) = 0.0;
    }
  VectorField f(derivative(psi, 0, 1), -1.0 * derivative(psi, 1, 0));
  const double norm = sobolev_norm(f, 0);
  if (norm <= 0.0) throw std::invalid_argument("empty forcing shell");
  return (G * nu * nu / norm) * f;
}

double DtPolicy::choose(const VectorField& u) const {
  if (fixed > 0.0) return fixed;
  const std::vector<double> pu = u.u.to_physical(), pv = u.v.to_physical();
  double speed = 0.0;
  for (std::size_t i = 0; i < pu.size(); ++i) speed = std::max(speed, std::hypot(pu[i], pv[i]));
  double dt = dt_max;
  if (speed > 0.0) dt = std::min(dt, cfl * u.grid().dx() / speed);
  if (mu > 0.0) dt = std::min(dt, 0.5 / mu);
  return dt;
}

NavierStokes::NavierStokes(const Grid& grid, DissipationSymbol symbol, VectorField forcing)
    : grid_(grid), symbol_(symbol), forcing_(leray(forcing)) {
  if (!(forcing.grid() == grid)) throw std::invalid_argument("forcing grid mismatch");
  if (!(symbol.nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (symbol.gamma < 0.0 || symbol.p < 0.0) throw std::invalid_argument("hyperdissipation must be non-negative");
  const int n = grid.n();
  symbol_values_.resize(grid.size());
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double kx = grid.wavenumber(ix), ky = grid.wavenumber(iy);
      symbol_values_[static_cast<std::size_t>(iy) * n + ix] = symbol_(kx * kx + ky * ky);
    }
}

const std::vector<double>& NavierStokes::factor(double dt) const {
  if (dt != factor_dt_) {
    factor_.resize(symbol_values_.size());
    for (std::size_t i = 0; i < factor_.size(); ++i) factor_[i] = std::exp(-symbol_values_[i] * dt);
    factor_dt_ = dt;
  }
  return factor_;
}

VectorField NavierStokes::rhs(const VectorField& u) const {
  VectorField r = forcing_;
  r -= nonlinear_term(u);
  return r;
}

VectorField NavierStokes::step(const VectorField& u, double dt, const Explicit& extra, VectorField* stage1) const {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const std::vector<double>& e = factor(dt);
  VectorField r0 = rhs(u);
  if (extra) r0 += extra(u, 0);
  VectorField u1 = u + dt * r0;
  scale_modes(u1, e);
  VectorField r1 = rhs(u1);
  if (extra) r1 += extra(u1, 1);
  if (stage1) *stage1 = u1;
  VectorField out = u;
  scale_modes(out, e);
  scale_modes(r0, e);
  out += (0.5 * dt) * (r0 + r1);
  const double before = sobolev_norm(u, 0), after = sobolev_norm(out, 0);
  if (!finite(out) || after > 10.0 * (before + dt * sobolev_norm(r0, 0)) + 1e-300)
    throw NumericalAbort("solution norm grew more than tenfold in one step");
  return out;
}

void NavierStokes::advance(SolverState& s, double dt) const {
  s.u = step(s.u, dt);
  s.t += dt;
}

double NavierStokes::energy(const VectorField& u) const { return 0.5 * std::pow(sobolev_norm(u, 0), 2); }

double NavierStokes::dissipation(const VectorField& u) const {
  double acc = 0.0;
  const auto cu = u.u.coeffs(), cv = u.v.coeffs();
  for (std::size_t i = 0; i < cu.size(); ++i) acc += symbol_values_[i] * (std::norm(cu[i]) + std::norm(cv[i]));
  return kTwoPi * kTwoPi * acc;
}

double NavierStokes::work(const VectorField& u) const { return l2_inner(forcing_, u); }

std::vector<double> energy_balance_series(const std::vector<EnergySample>& tr) {
  std::vector<double> out(tr.size(), 0.0);
  if (tr.size() < 5) return out;
  const double h = tr[1].t - tr[0].t;
  for (std::size_t i = 2; i + 2 < tr.size(); ++i) {
    const double dedt =
        (tr[i - 2].energy - 8.0 * tr[i - 1].energy + 8.0 * tr[i + 1].energy - tr[i + 2].energy) / (12.0 * h);
    out[i] = dedt + tr[i].dissipation - tr[i].work;
  }
  return out;
}

double energy_balance_residual(const std::vector<EnergySample>& tr) {
  double r = 0.0;
  for (double v : energy_balance_series(tr)) r = std::max(r, std::abs(v));
  return r;
}

AbsorbingBallReport spin_up(const NavierStokes& ns, const ForcingSpec& forcing, SolverState& state, double horizon,
                            const SpinUpOptions& opt) {
  if (opt.k < 1) throw std::invalid_argument("spin-up level must be at least 1");
  if (!(opt.save_interval > 0.0)) throw std::invalid_argument("save interval must be positive");
  AbsorbingBallReport rep;
  rep.k = opt.k;
  rep.radius.assign(opt.k + 1, 0.0);
  for (int l = 1; l <= opt.k; ++l) {
    const double s = l - 1 < static_cast<int>(forcing.sigma.size()) ? forcing.sigma[l - 1] : 1.0;
    rep.radius[l] = absorbing_radius(s, forcing.grashof, l);
  }
  const double nu = ns.symbol().nu;
  const double tol = 1e-10 * std::max(1.0, sobolev_norm(state.u, 1) / nu);
  std::vector<EnergySample> energy;
  int streak = 0;
  double streak_start = 0.0;
  auto record = [&]() {
    SeriesRow row;
    row.t = state.t;
    for (int l = 0; l <= opt.k; ++l) row.norms.push_back(sobolev_norm(state.u, l));
    rep.series.push_back(row);
    energy.push_back({state.t, ns.energy(state.u), ns.dissipation(state.u), ns.work(state.u)});
    if (!rep.absorbed) {
      if (row.norms[1] / nu <= 2.0 * forcing.grashof + tol) {
        if (streak++ == 0) streak_start = state.t;
        if (streak >= opt.window) {
          rep.absorbed = true;
          rep.t0 = streak_start;
        }
      } else {
        streak = 0;
      }
    }
  };
  record();
  const double t_end = state.t + horizon;
  while (state.t < t_end - 1e-12) {
    const double next = std::min(state.t + opt.save_interval, t_end);
    const double span = next - state.t;
    const int steps = static_cast<int>(std::ceil(span / opt.dt.choose(state.u) - 1e-9));
    const double dt = span / std::max(1, steps);
    for (int s = 0; s < std::max(1, steps); ++s) ns.advance(state, dt);
    state.t = next;
    record();
  }
  const std::vector<double> res = energy_balance_series(energy);
  for (std::size_t i = 0; i < rep.series.size(); ++i) rep.series[i].residual = res[i];
  rep.max_ratio.assign(opt.k + 1, 0.0);
  if (rep.absorbed)
    for (const auto& row : rep.series) {
      if (row.t < rep.t0) continue;
      for (int l = 1; l <= opt.k; ++l)
        if (rep.radius[l] > 0.0) rep.max_ratio[l] = std::max(rep.max_ratio[l], row.norms[l] / (nu * rep.radius[l]));
    }
  return rep;
}

void write_series_csv(std::ostream& os, const std::vector<SeriesRow>& rows, int k) {
  os << "t";
  for (int l = 0; l <= k; ++l) os << ",norm_h" << l;
  os << ",energy_residual\n";
  for (const auto& r : rows) {
    os << fmt(r.t);
    for (int l = 0; l <= k; ++l) os << ',' << fmt(l < static_cast<int>(r.norms.size()) ? r.norms[l] : 0.0);
    os << ',' << fmt(r.residual) << '\n';
  }
}

}  // namespace mfda
