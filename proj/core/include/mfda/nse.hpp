#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfda/spectral.hpp"

namespace mfda {

class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P (u . grad) u, evaluated in rotational form on the 2/3-dealiased grid.
VectorField nonlinear_term(const VectorField& u);

// Projected, mean-free forcing with cached Grashof number and shape factors.
struct ForcingSpec {
  VectorField f;
  double nu = 1.0;
  double grashof = 0.0;
  std::vector<double> sigma;  // sigma_j, j = 0..kmax

  ForcingSpec(VectorField force, double viscosity, int kmax = 4);
  explicit ForcingSpec(const Grid& grid, double viscosity = 1.0) : ForcingSpec(VectorField(grid), viscosity, 0) {}
  bool zero() const { return grashof == 0.0; }
};

// G = ||P f||_{L2} / nu^2.
double grashof(const VectorField& f, double nu);
// sigma_k = ||P f||_{H^k} / ||P f||_{L2}.
double shape_factor(const VectorField& f, int k);
// Normalized absorbing-ball radius (sigma_{k-1}^{1/k} + G)^{k-1} G.
double absorbing_radius(double sigma_km1, double grashof, int k);

// (a sin(kf y), 0).
VectorField kolmogorov_forcing(const Grid& grid, int kf, double amplitude);
// Kolmogorov forcing scaled to Grashof number G.
VectorField forcing_for_grashof(const Grid& grid, double nu, double G, int kf = 2);
// Random solenoidal forcing on the shell kmin <= |k| <= kmax, scaled to G.
VectorField shell_forcing(const Grid& grid, double nu, double G, int kmin, int kmax, unsigned long long seed);

struct DtPolicy {
  double cfl = 0.4;
  double dt_max = 0.05;
  double mu = 0.0;
  double fixed = 0.0;  // > 0 overrides the adaptive choice

  double choose(const VectorField& u) const;
};

struct SolverState {
  VectorField u;
  double t = 0.0;
  explicit SolverState(const Grid& g) : u(g) {}
  SolverState(VectorField v, double time) : u(std::move(v)), t(time) {}
};

// Integrating-factor Heun scheme for
//   u_t + L u = -P (u . grad) u + P f + extra(u, stage).
class NavierStokes {
 public:
  using Explicit = std::function<VectorField(const VectorField& state, int stage)>;

  NavierStokes(const Grid& grid, DissipationSymbol symbol, VectorField forcing);

  const Grid& grid() const { return grid_; }
  const DissipationSymbol& symbol() const { return symbol_; }
  const VectorField& forcing() const { return forcing_; }

  VectorField rhs(const VectorField& u) const;
  // One step; stage1 receives the intermediate state if non-null.
  VectorField step(const VectorField& u, double dt, const Explicit& extra = {}, VectorField* stage1 = nullptr) const;
  void advance(SolverState& s, double dt) const;

  // 1/2 ||u||^2, nu ||grad u||^2 + gamma ||(-Lap)^{(p+1)/2} u||^2, <f, u>.
  double energy(const VectorField& u) const;
  double dissipation(const VectorField& u) const;
  double work(const VectorField& u) const;

 private:
  const std::vector<double>& factor(double dt) const;

  Grid grid_;
  DissipationSymbol symbol_;
  VectorField forcing_;
  std::vector<double> symbol_values_;
  mutable double factor_dt_ = -1.0;
  mutable std::vector<double> factor_;
};

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double work = 0.0;
};

// dE/dt + D - W by a five-point difference; zero at the two ends of each side.
std::vector<double> energy_balance_series(const std::vector<EnergySample>& trajectory);
// Largest interior residual.
double energy_balance_residual(const std::vector<EnergySample>& trajectory);

struct SeriesRow {
  double t = 0.0;
  std::vector<double> norms;  // ||u||_{H^l}, l = 0..k
  double residual = 0.0;
};

struct AbsorbingBallReport {
  int k = 1;
  std::vector<double> radius;  // rho_l, l = 1..k (index 0 unused)
  std::vector<SeriesRow> series;
  bool absorbed = false;
  double t0 = 0.0;
  // Largest ||u||_{H^l} / (nu rho_l) after t0.
  std::vector<double> max_ratio;
  std::string status() const { return absorbed ? "absorbed" : "not absorbed"; }
};

struct SpinUpOptions {
  int k = 2;
  double save_interval = 0.1;
  int window = 20;
  DtPolicy dt;
};

// Integrates to the horizon, monitoring ||u||_{H1}/nu <= 2G.
AbsorbingBallReport spin_up(const NavierStokes& ns, const ForcingSpec& forcing, SolverState& state,
                            double horizon, const SpinUpOptions& opt);

void write_series_csv(std::ostream& os, const std::vector<SeriesRow>& rows, int k);

}  // namespace mfda
