#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mfda/assimilation.hpp"

using namespace mfda;

namespace {

VectorField shear(const Grid& g, int k, double a) {
  VectorField w(g);
  w.u.mode(0, k) = Complex(0.0, -0.5 * a);
  w.u.mode(0, -k) = Complex(0.0, 0.5 * a);
  return w;
}

}  // namespace

TEST_SUITE("assimilation") {
  TEST_CASE("observations") {
    const Grid g(32);
    const NavierStokes ns(g, {0.1, 0.0, 0.0}, VectorField(g));
    const GlobalInterpolant vol = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::volume_average());
    const AssimilationRun run(ns, vol, 1.0, VectorField(g), VectorField(g));
    CHECK(sobolev_norm(run.observe(VectorField(g)), 0) == 0.0);
    const VectorField u = random_velocity(g, 5, 1.0, 2);
    const VectorField o = run.observe(u);
    CHECK(std::abs(o.u.mode(0, 0)) < 1e-15);
    CHECK(std::abs(o.v.mode(0, 0)) < 1e-15);

    const GlobalInterpolant spec = GlobalInterpolant::uniform(uniform_cover(1, 0.25), LocalInterpolant::spectral(10.0));
    const AssimilationRun exact(ns, spec, 1.0, VectorField(g), VectorField(g));
    CHECK(sobolev_norm(exact.observe(u) - u, 0) < 1e-12 * sobolev_norm(u, 0));
  }

  TEST_CASE("synchronized start stays synchronized") {
    const Grid g(32);
    const double nu = 0.1;
    const NavierStokes ns(g, {nu, 0.0, 0.0}, forcing_for_grashof(g, nu, 20.0, 2));
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::lagrange(1));
    const VectorField u0 = random_velocity(g, 4, 2.0, 6);
    AssimilationRun run(ns, I, 5.0, u0, u0);
    for (int s = 0; s < 20; ++s) run.coupled_step(0.02);
    CHECK(run.errors(1)[1] <= 1e-12);
  }

  TEST_CASE("no feedback decouples the observer") {
    const Grid g(32);
    const double nu = 0.1;
    const NavierStokes ns(g, {nu, 0.0, 0.0}, forcing_for_grashof(g, nu, 20.0, 2));
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::volume_average());
    const VectorField u0 = random_velocity(g, 4, 2.0, 6), v0 = random_velocity(g, 4, 2.0, 7);
    AssimilationRun run(ns, I, 0.0, u0, v0);
    VectorField v = v0;
    for (int s = 0; s < 10; ++s) {
      run.coupled_step(0.02);
      v = ns.step(v, 0.02);
    }
    CHECK(sobolev_norm(run.observer() - v, 0) == 0.0);
  }

  TEST_CASE("identity-like feedback adds mu to the decay rate") {
    const Grid g(32);
    const double nu = 0.1, mu = 4.0;
    const NavierStokes ns(g, {nu, 0.0, 0.0}, VectorField(g));
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(1, 0.25), LocalInterpolant::spectral(10.0));
    AssimilationRun run(ns, I, mu, VectorField(g), shear(g, 2, 1e-3));
    const double dt = 0.001;
    const int steps = 250;
    const double e0 = run.errors(0)[0];
    for (int s = 0; s < steps; ++s) run.coupled_step(dt);
    const double rate = -std::log(run.errors(0)[0] / e0) / (steps * dt);
    CHECK(rate == doctest::Approx(nu * 4.0 + mu).epsilon(1e-5));
  }

  TEST_CASE("feedback guard") {
    const Grid g(16);
    const NavierStokes ns(g, {0.1, 0.0, 0.0}, VectorField(g));
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(2, 0.25), LocalInterpolant::volume_average());
    AssimilationRun run(ns, I, 10.0, VectorField(g), VectorField(g));
    CHECK_THROWS_AS(run.coupled_step(0.1), std::invalid_argument);
    CHECK_THROWS(AssimilationRun(ns, I, -1.0, VectorField(g), VectorField(g)));
  }

  TEST_CASE("replay from a log is bitwise identical") {
    const Grid g(32);
    const double nu = 0.1;
    const NavierStokes ns(g, {nu, 0.0, 0.0}, forcing_for_grashof(g, nu, 20.0, 2));
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::lagrange(1));
    ObservationLog log;
    AssimilationRun run(ns, I, 5.0, random_velocity(g, 4, 2.0, 1), VectorField(g));
    run.set_log(&log);
    for (int s = 0; s < 6; ++s) run.coupled_step(0.02);
    CHECK(log.size() == 12);
    std::stringstream ss;
    log.write(ss);
    const ObservationLog back = ObservationLog::read(ss);
    const std::vector<VectorField> states = replay(ns, I, 5.0, VectorField(g), back);
    REQUIRE(states.size() == 6);
    const auto& a = states.back().u.coeffs();
    const auto& b = run.observer().u.coeffs();
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];
    CHECK(same);
  }

  TEST_CASE("uniform condition arithmetic") {
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::volume_average());
    const double h = *I.uniform_scale(), nu = 0.1;
    ConditionInputs in;
    in.nu = nu;
    in.mu = 0.01 * nu / (h * h);
    in.grashof = 0.0;
    const ConditionReport r = check_conditions(in, I, ConditionMode::Uniform);
    CHECK(r.item("sync-uniform").lhs == doctest::Approx(0.01));
    CHECK(r.item("sync-uniform").pass);
    CHECK(r.item("wellposed-uniform").lhs == doctest::Approx(0.01));
    in.safety = 10.0;
    CHECK(check_conditions(in, I, ConditionMode::Uniform).item("sync-uniform").pass);
    in.mu *= 1.5;
    CHECK_FALSE(check_conditions(in, I, ConditionMode::Uniform).item("sync-uniform").pass);
    CHECK(r.to_json().find("\"regime\"") != std::string::npos);
  }

  TEST_CASE("hyperdissipative summand vanishes without gamma") {
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::lagrange(2));
    ConditionInputs in;
    in.mu = 3.0;
    in.nu = 0.1;
    in.p = 2.0;
    const ConditionReport a = check_conditions(in, I, ConditionMode::Uniform);
    in.p = 0.0;
    const ConditionReport b = check_conditions(in, I, ConditionMode::Uniform);
    CHECK(a.item("sync-uniform").lhs == b.item("sync-uniform").lhs);
    in.gamma = 0.5;
    in.p = 2.0;
    CHECK(check_conditions(in, I, ConditionMode::Uniform).item("sync-uniform").lhs > b.item("sync-uniform").lhs);
  }

  TEST_CASE("optimal cellwise sum") {
    const Cover c = uniform_cover(4, 0.25);
    const GlobalInterpolant I = GlobalInterpolant::uniform(c, LocalInterpolant::lagrange(1));
    EnsembleSpec ens;
    ens.size = 3;
    const AssociatedConstants k = estimate_all_constants(LocalInterpolant::lagrange(1), c[0], ens);
    ConditionInputs in;
    in.mu = 0.2;
    in.nu = 0.1;
    const ConditionReport r = check_conditions(in, I, ConditionMode::Optimal, {k});
    CHECK(r.pi0 == 9);
    const ConditionItem& it = r.item("optimal-cellwise");
    CHECK(it.rhs == doctest::Approx(1.0 / 90.0));
    const double hq = c[0].diameter();
    CHECK(it.lhs == doctest::Approx(16.0 * std::pow(k.optimal(1, 2), 2) * in.mu * hq * hq / in.nu));
    CHECK_THROWS(check_conditions(in, I, ConditionMode::General));
    const GlobalInterpolant T = GlobalInterpolant::uniform(c, LocalInterpolant::taylor1());
    CHECK_THROWS(check_conditions(in, T, ConditionMode::Optimal, {k}));
  }

  TEST_CASE("decay fits") {
    std::vector<double> t, e, noisy, flat;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.02);
    for (int i = 0; i <= 100; ++i) {
      t.push_back(0.05 * i);
      e.push_back(std::exp(-3.0 * t.back()));
      noisy.push_back(e.back() * std::exp(n(rng)));
      flat.push_back(1.0);
    }
    CHECK(fit_decay(t, e).rate == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit_decay(t, noisy).rate == doctest::Approx(3.0).epsilon(0.05));
    CHECK(std::abs(fit_decay(t, flat).rate) < 1e-12);
    const std::vector<double> zero(t.size(), 0.0);
    CHECK(fit_decay(t, zero).synchronized);
  }

  TEST_CASE("small experiment end to end") {
    ExperimentConfig c;
    c.n = 32;
    c.nu = 0.1;
    c.forcing.grashof = 10.0;
    c.cover.cells = 4;
    c.interpolant = "volavg0";
    c.spinup = 2.0;
    c.horizon = 2.0;
    c.save_interval = 0.05;
    c.mode = "uniform";
    c.track = 1;
    c.log_observations = true;
    const ExperimentResult r = run_experiment(c);
    CHECK(r.grashof == doctest::Approx(10.0));
    CHECK(r.mu == doctest::Approx(r.conditions.mu_min));
    CHECK(r.fits.size() == 2);
    CHECK(r.series.size() == 41);
    CHECK(r.outside_regime);
    CHECK(r.log.size() > 0);
    CHECK(r.series_csv().rfind("t,e0,e1\n", 0) == 0);
    CHECK(r.fits_json().find("rate") != std::string::npos);
    const ExperimentResult again = run_experiment(c);
    CHECK(again.series_csv() == r.series_csv());
  }

  TEST_CASE("cyclic operator assignment") {
    const auto ops = assign_locals("lagrange:1,volavg0", 5);
    REQUIRE(ops.size() == 5);
    CHECK(ops[0].kind == InterpKind::Lagrange);
    CHECK(ops[1].kind == InterpKind::VolAvg0);
    CHECK(ops[4].kind == InterpKind::Lagrange);
  }
}
