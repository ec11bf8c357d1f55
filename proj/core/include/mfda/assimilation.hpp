#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mfda/global_interp.hpp"
#include "mfda/nse.hpp"
#include "mfda/snapshot.hpp"

namespace mfda {

// Sequence of observation records, two per coupled step (both stage times).
class ObservationLog {
 public:
  void record(const Snapshot& s) { records_.push_back(s); }
  const std::vector<Snapshot>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  void write(std::ostream& os) const;
  static ObservationLog read(std::istream& is);

 private:
  std::vector<Snapshot> records_;
};

// The nudged system; it only ever sees observations.
class Observer {
 public:
  Observer(const NavierStokes& ns, const GlobalInterpolant& interp, double mu, VectorField v0, int band = -1);

  const VectorField& state() const { return v_; }
  double mu() const { return mu_; }
  const GridApplicator& applicator() const { return *applicator_; }
  // J w as the physical record the observer consumes.
  Snapshot observe(const VectorField& w, double t) const;
  // J w, passed through the snapshot channel.
  VectorField interpolate(const VectorField& w) const;
  // obs0, obs1: observations at the start and the intermediate stage.
  void step(double dt, const VectorField& obs0, const VectorField& obs1);

 private:
  const NavierStokes* ns_;
  std::shared_ptr<GridApplicator> applicator_;
  double mu_;
  VectorField v_;
};

class AssimilationRun {
 public:
  AssimilationRun(const NavierStokes& ns, const GlobalInterpolant& interp, double mu, VectorField u0, VectorField v0,
                  int band = -1);

  const VectorField& truth() const { return u_; }
  const VectorField& observer() const { return observer_.state(); }
  double time() const { return t_; }
  double mu() const { return observer_.mu(); }

  VectorField observe(const VectorField& u) const;
  void coupled_step(double dt);
  // ||v - u||_{H^l}, l = 0..lmax.
  std::vector<double> errors(int lmax) const;
  void set_log(ObservationLog* log) { log_ = log; }

 private:
  const NavierStokes* ns_;
  Observer observer_;
  VectorField u_;
  double t_ = 0.0;
  ObservationLog* log_ = nullptr;
};

// Observer trajectory driven by a recorded log; returns the state after each step.
std::vector<VectorField> replay(const NavierStokes& ns, const GlobalInterpolant& interp, double mu,
                                const VectorField& v0, const ObservationLog& log, int band = -1);

enum class ConditionMode { H1Baseline, General, Uniform, Optimal };
std::string to_string(ConditionMode m);
ConditionMode parse_condition_mode(const std::string& s);

struct ConditionInputs {
  double mu = 0.0;
  double nu = 1.0;
  double gamma = 0.0;
  double p = 0.0;
  double grashof = 0.0;
  double safety = 1.0;  // pass when lhs <= rhs / safety
};

struct ConditionItem {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct ConditionReport {
  ConditionMode mode = ConditionMode::H1Baseline;
  double mu_min = 0.0;  // nu (1 + log(1 + G)) G
  int pi0 = 0;
  double h = 0.0;
  std::vector<ConditionItem> items;
  bool pass() const;
  const ConditionItem& item(const std::string& name) const;
  std::string to_json() const;
};

// Unknown constants are 1. constants: one set per cell or a single shared set;
// required for the general and optimal modes.
ConditionReport check_conditions(const ConditionInputs& in, const GlobalInterpolant& interp, ConditionMode mode,
                                 const std::vector<AssociatedConstants>& constants = {});

struct DecayFit {
  double t_a = 0.0;
  double t_b = 0.0;
  double rate = 0.0;
  double residual = 0.0;
  double floor = 1e-11;
  int points = 0;
  bool synchronized = false;  // every point below the floor
  std::string status() const { return synchronized ? "already synchronized" : "fitted"; }
};

// Least squares on log e(t) over the exponential window.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& e, double floor = 1e-11);

struct ForcingConfig {
  std::string kind = "kolmogorov";  // kolmogorov | shell | none
  double grashof = 50.0;
  int kf = 2;
  int kmin = 2;
  int kmax = 4;
};

struct CoverConfig {
  std::string kind = "uniform";  // uniform | dyadic | file
  int cells = 16;
  int levels = 2;
  double collar_fraction = 0.25;
  std::string path;
};

struct ExperimentConfig {
  int n = 128;
  double nu = 0.1;
  double gamma = 0.0;
  double p = 0.0;
  ForcingConfig forcing;
  CoverConfig cover;
  // One spec, or a comma-separated list assigned to cells cyclically.
  std::string interpolant = "volavg0";
  int smoothness = 4;
  double mu = -1.0;  // < 0: mu_factor * nu (1 + log(1 + G)) G
  double mu_factor = 1.0;
  double spinup = 20.0;
  double horizon = 10.0;
  double save_interval = 0.05;
  double dt_max = 0.05;
  double cfl = 0.4;
  unsigned long long seed = 1;
  std::string observer_init = "zero";  // zero | random
  int track = -1;  // highest error level; < 0 uses the family order (level k in optimal mode)
  std::string mode = "uniform";
  double safety = 10.0;
  double floor = 1e-11;
  int ensemble = 4;
  bool log_observations = false;
};

struct ErrorRow {
  double t = 0.0;
  std::vector<double> e;
};

struct ExperimentResult {
  std::vector<ErrorRow> series;
  std::vector<DecayFit> fits;  // per level
  ConditionReport conditions;
  double mu = 0.0;
  double grashof = 0.0;
  bool outside_regime = false;
  ObservationLog log;
  std::string series_csv() const;
  std::string fits_json() const;
};

std::vector<LocalInterpolant> assign_locals(const std::string& spec, std::size_t cells);
Cover build_cover(const CoverConfig& c);
VectorField build_forcing(const Grid& grid, double nu, const ForcingConfig& f, unsigned long long seed);
// Random solenoidal field with |k|_inf <= band and L2 norm equal to scale.
VectorField random_velocity(const Grid& grid, int band, double scale, unsigned long long seed);

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace mfda
