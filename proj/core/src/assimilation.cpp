#include "mfda/assimilation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "mfda/fit.hpp"

namespace mfda {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const AssociatedConstants& constants_for(const std::vector<AssociatedConstants>& c, std::size_t q) {
  return c.size() == 1 ? c[0] : c[q];
}

}  // namespace

void ObservationLog::write(std::ostream& os) const {
  for (const auto& s : records_) write_snapshot(os, s);
}

ObservationLog ObservationLog::read(std::istream& is) {
  ObservationLog log;
  Snapshot s;
  while (read_snapshot(is, s)) log.record(s);
  return log;
}

Observer::Observer(const NavierStokes& ns, const GlobalInterpolant& interp, double mu, VectorField v0, int band)
    : ns_(&ns), applicator_(std::make_shared<GridApplicator>(interp, ns.grid(), band)), mu_(mu), v_(std::move(v0)) {
  if (mu < 0.0) throw std::invalid_argument("nudging parameter must be non-negative");
  if (!(v_.grid() == ns.grid())) throw std::invalid_argument("observer grid mismatch");
}

Snapshot Observer::observe(const VectorField& w, double t) const {
  return make_snapshot(applicator_->apply_mean_free(w), "observation", t, ns_->symbol());
}

VectorField Observer::interpolate(const VectorField& w) const { return snapshot_vector(observe(w, 0.0)); }

void Observer::step(double dt, const VectorField& obs0, const VectorField& obs1) {
  if (mu_ * dt > 0.5 + 1e-12) throw std::invalid_argument("time step violates dt * mu <= 1/2");
  if (mu_ == 0.0) {
    v_ = ns_->step(v_, dt);
    return;
  }
  const VectorField* obs[2] = {&obs0, &obs1};
  auto feedback = [&](const VectorField& w, int stage) {
    VectorField d = interpolate(w) - *obs[stage];
    dealias(d);
    return (-mu_) * leray(d);
  };
  v_ = ns_->step(v_, dt, feedback);
}

AssimilationRun::AssimilationRun(const NavierStokes& ns, const GlobalInterpolant& interp, double mu, VectorField u0,
                                 VectorField v0, int band)
    : ns_(&ns), observer_(ns, interp, mu, std::move(v0), band), u_(std::move(u0)) {
  if (!(u_.grid() == ns.grid())) throw std::invalid_argument("truth grid mismatch");
}

VectorField AssimilationRun::observe(const VectorField& u) const { return observer_.interpolate(u); }

void AssimilationRun::coupled_step(double dt) {
  VectorField u1(ns_->grid());
  VectorField next = ns_->step(u_, dt, {}, &u1);
  Snapshot s0 = observer_.observe(u_, t_), s1 = observer_.observe(u1, t_ + dt);
  observer_.step(dt, snapshot_vector(s0), snapshot_vector(s1));
  s0.step = s1.step = dt;
  if (log_) {
    log_->record(std::move(s0));
    log_->record(std::move(s1));
  }
  u_ = std::move(next);
  t_ += dt;
}

std::vector<double> AssimilationRun::errors(int lmax) const {
  const VectorField w = observer_.state() - u_;
  std::vector<double> e;
  for (int l = 0; l <= lmax; ++l) e.push_back(sobolev_norm(w, l));
  return e;
}

std::vector<VectorField> replay(const NavierStokes& ns, const GlobalInterpolant& interp, double mu,
                                const VectorField& v0, const ObservationLog& log, int band) {
  if (log.size() % 2 != 0) throw std::invalid_argument("observation log must hold two records per step");
  Observer obs(ns, interp, mu, v0, band);
  std::vector<VectorField> out;
  const auto& r = log.records();
  for (std::size_t i = 0; i < r.size(); i += 2) {
    const double dt = r[i].step > 0.0 ? r[i].step : r[i + 1].time - r[i].time;
    obs.step(dt, snapshot_vector(r[i]), snapshot_vector(r[i + 1]));
    out.push_back(obs.state());
  }
  return out;
}

std::string to_string(ConditionMode m) {
  switch (m) {
    case ConditionMode::H1Baseline:
      return "h1-baseline";
    case ConditionMode::General:
      return "general";
    case ConditionMode::Uniform:
      return "uniform";
    case ConditionMode::Optimal:
      return "optimal";
  }
  return "unknown";
}

ConditionMode parse_condition_mode(const std::string& s) {
  if (s == "h1-baseline" || s == "baseline") return ConditionMode::H1Baseline;
  if (s == "general") return ConditionMode::General;
  if (s == "uniform") return ConditionMode::Uniform;
  if (s == "optimal") return ConditionMode::Optimal;
  throw std::invalid_argument("unknown condition mode '" + s + "'");
}

bool ConditionReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const ConditionItem& i) { return i.pass; });
}

const ConditionItem& ConditionReport::item(const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return i;
  throw std::out_of_range("no condition named '" + name + "'");
}

std::string ConditionReport::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = to_string(mode);
  j["mu_min"] = mu_min;
  j["pi0"] = pi0;
  j["h"] = h;
  j["pass"] = pass();
  j["regime"] = pass() ? "sufficient" : "outside sufficient regime";
  auto arr = nlohmann::ordered_json::array();
  for (const auto& i : items) arr.push_back({{"name", i.name}, {"lhs", i.lhs}, {"rhs", i.rhs}, {"pass", i.pass}});
  j["conditions"] = arr;
  return j.dump(2);
}

ConditionReport check_conditions(const ConditionInputs& in, const GlobalInterpolant& interp, ConditionMode mode,
                                 const std::vector<AssociatedConstants>& constants) {
  if (!(in.nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (in.mu < 0.0 || in.gamma < 0.0 || in.p < 0.0 || in.grashof < 0.0)
    throw std::invalid_argument("condition inputs must be non-negative");
  if (!(in.safety >= 1.0)) throw std::invalid_argument("safety factor must be at least 1");
  const Cover& cov = interp.cover();
  const bool needs_constants = mode == ConditionMode::General || mode == ConditionMode::Optimal;
  if (needs_constants) {
    if (constants.empty()) throw std::invalid_argument("missing local constants for " + to_string(mode) + " mode");
    if (constants.size() != 1 && constants.size() != cov.size())
      throw std::invalid_argument("need one set of local constants per cell, or one shared set");
    for (const auto& c : constants)
      if (c.eps.rows() < c.order + 1 || c.eps.cols() < c.level + 1)
        throw std::invalid_argument("incomplete local constant table");
  }
  if (mode == ConditionMode::Optimal && !interp.optimal())
    throw std::invalid_argument("optimal mode requires an optimally interpolating family");
  if (mode == ConditionMode::Uniform && !interp.uniform_scale())
    throw std::invalid_argument("uniform mode requires a cover with a uniform scale");

  ConditionReport rep;
  rep.mode = mode;
  rep.pi0 = cov.overlap_bound();
  rep.h = interp.uniform_scale().value_or(cov.max_diameter());
  rep.mu_min = in.nu * (1.0 + std::log1p(in.grashof)) * in.grashof;
  const double mu = in.mu, nu = in.nu;
  const bool hyper = in.gamma > 0.0;
  const int P = static_cast<int>(std::floor(in.p + 1e-12));
  const double h = rep.h;
  const double r = mu * h * h / nu;
  const double tight = 1.0 / (10.0 * rep.pi0);

  auto add = [&](const std::string& name, double lhs, double rhs) {
    rep.items.push_back({name, lhs, rhs, lhs <= rhs / in.safety * (1.0 + 1e-12)});
  };
  add("h1-wellposed", mu * cov.max_diameter() * cov.max_diameter() / nu, 1.0);
  rep.items.push_back({"h1-sync-mu", rep.mu_min, mu, rep.mu_min <= mu * (1.0 + 1e-12)});

  switch (mode) {
    case ConditionMode::H1Baseline:
      break;
    case ConditionMode::General: {
      double b = 0.0, gen = 0.0, h1 = 0.0;
      for (std::size_t q = 0; q < cov.size(); ++q) {
        const AssociatedConstants& c = constants_for(constants, q);
        const double hq = cov[q].diameter();
        const double rq = mu * hq * hq / nu;
        // Generic form: varepsilon_{i,j} does not depend on i.
        auto eps = [&](int j) { return c.general(j); };
        double sb = 0.0, sg = 0.0, sh = 0.0;
        if (hyper)
          for (int j = 1; j <= P; ++j) {
            sb += eps(j) * eps(j) * std::pow(hq, 2.0 * (j - 2));
            sg += eps(j) * eps(j) * std::pow(hq, 2.0 * (j - 1));
            sh += eps(j + 2) * eps(j + 2) * std::pow(hq, 2.0 * j);
          }
        b = std::max(b, rq * (eps(1) + eps(2) + (hyper ? (nu / in.gamma) * rq * sb : 0.0)));
        gen = std::max(gen, rq * (eps(1) + eps(2) + (hyper ? (mu / in.gamma) * sg : 0.0)));
        h1 = std::max(h1, rq * (eps(1) * eps(1) + eps(2) * eps(2) + (hyper ? (mu * hq * hq / in.gamma) * sh : 0.0)));
      }
      add("wellposed-cellwise", b, tight);
      add("sync-cellwise", gen, tight);
      add("h1-cellwise", h1, tight);
      break;
    }
    case ConditionMode::Uniform: {
      double sa = 0.0, s6 = 0.0, sh = 0.0;
      if (hyper)
        for (int j = 1; j <= P; ++j) {
          sa += std::pow(h, 2.0 * (j - 2));
          s6 += std::pow(h, 2.0 * (j - 1));
          sh += std::pow(h, 2.0 * j);
        }
      add("wellposed-uniform", r * (1.0 + (hyper ? (nu / in.gamma) * r * sa : 0.0)), 0.1);
      add("sync-uniform", r * (1.0 + (hyper ? (mu / in.gamma) * s6 : 0.0)), 0.1);
      add("h1-uniform", r * (1.0 + (hyper ? sh : 0.0)), 0.1);
      break;
    }
    case ConditionMode::Optimal: {
      const int k = interp.level() - 1;
      double s8 = 0.0, h1 = 0.0;
      for (std::size_t q = 0; q < cov.size(); ++q) {
        const AssociatedConstants& c = constants_for(constants, q);
        const double hq = cov[q].diameter();
        const double rq = mu * hq * hq / nu;
        const double e = c.optimal(k, k + 1);
        s8 += e * e * rq;
        h1 = std::max(h1, c.general(1) * c.general(1) * rq);
      }
      add("optimal-cellwise", s8, tight);
      add("h1-optimal-cellwise", h1, tight);
      if (interp.uniform_scale()) {
        add("optimal-uniform", r, 0.1);
        add("h1-optimal-uniform", r, 0.1);
      }
      break;
    }
  }
  return rep;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& e, double floor) {
  if (t.size() != e.size()) throw std::invalid_argument("time and error series differ in length");
  if (!(floor > 0.0)) throw std::invalid_argument("floor must be positive");
  DecayFit out;
  out.floor = floor;
  if (e.empty()) throw std::invalid_argument("empty error series");
  const double threshold = floor * e.front();
  std::ptrdiff_t end = -1;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] > threshold && e[i] > 0.0) end = static_cast<std::ptrdiff_t>(i);
  if (end < 0 || e.front() <= 0.0) {
    out.synchronized = true;
    return out;
  }
  double emax = 0.0;
  for (std::ptrdiff_t i = 0; i <= end; ++i) emax = std::max(emax, e[i]);
  std::ptrdiff_t start = 0;
  for (std::ptrdiff_t i = 0; i <= end; ++i)
    if (e[i] <= 0.1 * emax) {
      start = i;
      break;
    }
  auto collect = [&](std::ptrdiff_t s, std::vector<double>& x, std::vector<double>& y) {
    x.clear();
    y.clear();
    for (std::ptrdiff_t i = s; i <= end; ++i)
      if (e[i] > threshold) {
        x.push_back(t[i]);
        y.push_back(std::log(e[i]));
      }
  };
  std::vector<double> x, y;
  collect(start, x, y);
  if (x.size() < 10) collect(0, x, y);
  if (x.size() < 10) throw std::invalid_argument("decay fit needs at least 10 points above the floor");
  const LineFit f = fit_line(x, y);
  out.rate = -f.slope;
  out.residual = f.residual;
  out.points = f.points;
  out.t_a = x.front();
  out.t_b = x.back();
  return out;
}

std::string ExperimentResult::series_csv() const {
  std::ostringstream os;
  os << "t";
  const std::size_t L = series.empty() ? 0 : series.front().e.size();
  for (std::size_t l = 0; l < L; ++l) os << ",e" << l;
  os << '\n';
  for (const auto& r : series) {
    os << fmt(r.t);
    for (double v : r.e) os << ',' << fmt(v);
    os << '\n';
  }
  return os.str();
}

std::string ExperimentResult::fits_json() const {
  nlohmann::ordered_json j;
  j["mu"] = mu;
  j["grashof"] = grashof;
  j["outside_regime"] = outside_regime;
  if (outside_regime) j["regime"] = "outside sufficient regime";
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < fits.size(); ++l) {
    const DecayFit& f = fits[l];
    arr.push_back({{"level", l},
                   {"status", f.status()},
                   {"rate", f.rate},
                   {"rate_over_half_mu", mu > 0.0 ? f.rate / (0.5 * mu) : 0.0},
                   {"t_a", f.t_a},
                   {"t_b", f.t_b},
                   {"points", f.points},
                   {"residual", f.residual},
                   {"floor", f.floor}});
  }
  j["fits"] = arr;
  return j.dump(2);
}

std::vector<LocalInterpolant> assign_locals(const std::string& spec, std::size_t cells) {
  std::vector<LocalInterpolant> kinds;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    kinds.push_back(LocalInterpolant::parse(item.substr(a, b - a + 1)));
  }
  if (kinds.empty()) throw std::invalid_argument("empty interpolant specification");
  std::vector<LocalInterpolant> out;
  for (std::size_t q = 0; q < cells; ++q) out.push_back(kinds[q % kinds.size()]);
  return out;
}

Cover build_cover(const CoverConfig& c) {
  if (c.kind == "uniform") return uniform_cover(c.cells, c.collar_fraction);
  if (c.kind == "dyadic") return dyadic_cover(c.levels, c.collar_fraction);
  if (c.kind == "file") return load_cover(c.path);
  throw std::invalid_argument("unknown cover kind '" + c.kind + "'");
}

VectorField build_forcing(const Grid& grid, double nu, const ForcingConfig& f, unsigned long long seed) {
  if (f.kind == "none" || f.grashof == 0.0) return VectorField(grid);
  if (f.kind == "kolmogorov") return forcing_for_grashof(grid, nu, f.grashof, f.kf);
  if (f.kind == "shell") return shell_forcing(grid, nu, f.grashof, f.kmin, f.kmax, seed);
  throw std::invalid_argument("unknown forcing kind '" + f.kind + "'");
}

VectorField random_velocity(const Grid& grid, int band, double scale, unsigned long long seed) {
  const SpectralField psi = random_field(grid, band, seed);
  VectorField w(derivative(psi, 0, 1), -1.0 * derivative(psi, 1, 0));
  const double norm = sobolev_norm(w, 0);
  if (norm <= 0.0) return w;
  return (scale / norm) * w;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Grid grid(cfg.n);
  const DissipationSymbol sym{cfg.nu, cfg.gamma, cfg.p};
  const VectorField f = build_forcing(grid, cfg.nu, cfg.forcing, cfg.seed + 17);
  const ForcingSpec fs(f, cfg.nu, 0);
  const NavierStokes ns(grid, sym, f);

  ExperimentResult res;
  res.grashof = fs.grashof;
  res.mu = cfg.mu >= 0.0 ? cfg.mu : cfg.mu_factor * cfg.nu * (1.0 + std::log1p(fs.grashof)) * fs.grashof;

  const Cover cover = build_cover(cfg.cover);
  const GlobalInterpolant interp(PartitionOfUnity(cover, cfg.smoothness), assign_locals(cfg.interpolant, cover.size()));
  const ConditionMode mode = parse_condition_mode(cfg.mode);
  std::vector<AssociatedConstants> constants;
  if (mode == ConditionMode::General || mode == ConditionMode::Optimal) {
    EnsembleSpec ens;
    ens.size = cfg.ensemble;
    ens.seed = cfg.seed;
    std::map<std::tuple<std::string, double, double, double>, AssociatedConstants> cache;
    for (std::size_t q = 0; q < cover.size(); ++q) {
      const Subdomain& c = cover[q];
      const LocalInterpolant& op = interp.locals()[q];
      const auto key = std::make_tuple(op.name(), c.sx, c.sy, c.collar);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, estimate_all_constants(op, c, ens)).first;
      constants.push_back(it->second);
    }
  }
  res.conditions = check_conditions({res.mu, cfg.nu, cfg.gamma, cfg.p, fs.grashof, cfg.safety}, interp, mode, constants);
  res.outside_regime = !res.conditions.pass();

  // Truth spun up from a seeded random state.
  const double scale = std::max(fs.grashof, 1.0) * cfg.nu;
  SolverState truth(random_velocity(grid, 4, scale, cfg.seed), 0.0);
  DtPolicy spin{cfg.cfl, cfg.dt_max, 0.0, 0.0};
  while (truth.t < cfg.spinup - 1e-12) {
    const double dt = std::min(spin.choose(truth.u), cfg.spinup - truth.t);
    ns.advance(truth, dt);
  }

  VectorField v0(grid);
  if (cfg.observer_init == "random")
    v0 = random_velocity(grid, 4, scale, cfg.seed + 1);
  else if (cfg.observer_init != "zero")
    throw std::invalid_argument("unknown observer initialization '" + cfg.observer_init + "'");

  const int track = cfg.track >= 0 ? cfg.track : (mode == ConditionMode::Optimal ? interp.level() - 1 : interp.order());
  AssimilationRun run(ns, interp, res.mu, truth.u, v0);
  if (cfg.log_observations) run.set_log(&res.log);
  const DtPolicy policy{cfg.cfl, cfg.dt_max, res.mu, 0.0};
  res.series.push_back({0.0, run.errors(track)});
  while (run.time() < cfg.horizon - 1e-12) {
    const double next = std::min(run.time() + cfg.save_interval, cfg.horizon);
    const double span = next - run.time();
    const int steps = std::max(1, static_cast<int>(std::ceil(span / policy.choose(run.truth()) - 1e-9)));
    for (int s = 0; s < steps; ++s) run.coupled_step(span / steps);
    res.series.push_back({run.time(), run.errors(track)});
  }
  std::vector<double> t;
  for (const auto& r : res.series) t.push_back(r.t);
  for (int l = 0; l <= track; ++l) {
    std::vector<double> e;
    for (const auto& r : res.series) e.push_back(r.e[l]);
    res.fits.push_back(fit_decay(t, e, cfg.floor));
  }
  return res;
}

}  // namespace mfda
