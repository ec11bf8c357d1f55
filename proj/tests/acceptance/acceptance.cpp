// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: mfda_acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "mfda/assimilation.hpp"
#include "mfda/dual_basis.hpp"
#include "mfda/fit.hpp"
#include "mfda/global_interp.hpp"
#include "mfda/nse.hpp"
#include "mfda/pou.hpp"

using namespace mfda;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Interpolation orders on a uniform ladder.
Outcome criterion1() {
  struct Row {
    std::string spec;
    int lmax;
    std::function<double(int)> expected;
    bool at_least = false;
  };
  std::vector<Row> rows = {
      {"volavg0", 0, [](int) { return 1.0; }},
      {"taylor1", 0, [](int) { return 2.0; }, true},
  };
  for (int k = 0; k <= 3; ++k) rows.push_back({fmt("sobolev:%d", k), k, [k](int l) { return k + 1.0 - l; }});
  for (int k = 1; k <= 3; ++k) {
    rows.push_back({fmt("lagrange:%d", k), k - 1, [k](int l) { return k + 1.0 - l; }});
    rows.push_back({fmt("volpoly:%d", k), k - 1, [k](int l) { return k + 1.0 - l; }});
  }
  const Grid grid(256);
  const SpectralField phi = random_field(grid, 1, 7);
  const SpectralSource src(phi);
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    const LocalInterpolant op = LocalInterpolant::parse(r.spec);
    std::vector<double> h;
    std::vector<std::vector<double>> err(r.lmax + 1);
    for (int c = 8; c <= 128; c *= 2) {
      const GlobalInterpolant interp = GlobalInterpolant::uniform(uniform_cover(c, 0.25), op);
      const GlobalNorms nr = global_norms(interp, src, r.lmax, 4);
      h.push_back(interp.cover().max_diameter());
      for (int l = 0; l <= r.lmax; ++l) err[l].push_back(nr.error[l]);
    }
    detail += " " + r.spec + "[";
    for (int l = 0; l <= r.lmax; ++l) {
      const double slope = loglog_fit(h, err[l]).slope;
      const double want = r.expected(l);
      const bool ok = r.at_least ? slope >= want - 0.3 : std::abs(slope - want) <= 0.3;
      pass = pass && ok;
      detail += fmt("%sl%d=%.2f/%g%s", l ? " " : "", l, slope, want, ok ? "" : "!");
    }
    detail += "]";
  }
  return {pass, detail};
}

// Partition of unity axioms on three refinement levels.
Outcome criterion2() {
  double dev = 0.0;
  bool plateau = true, support = true;
  std::array<double, 5> lo, hi;
  lo.fill(1e300);
  hi.fill(0.0);
  for (int c : {4, 8, 16}) {
    const PouReport r = check_pou(build_pou(uniform_cover(c, 0.25)), 128);
    dev = std::max(dev, r.sum_max_deviation);
    plateau = plateau && r.plateau_exact;
    support = support && r.support_exact;
    for (int l = 1; l <= 4; ++l) {
      lo[l] = std::min(lo[l], r.c_min[l]);
      hi[l] = std::max(hi[l], r.c_max[l]);
    }
  }
  double worst = 0.0;
  for (int l = 1; l <= 4; ++l) worst = std::max(worst, hi[l] / lo[l]);
  const bool pass = dev <= 1e-12 && plateau && support && worst <= 2.0;
  return {pass, fmt("sum deviation %.2e, plateau %s, support %s, worst c_l spread %.3f", dev,
                    plateau ? "exact" : "broken", support ? "exact" : "broken", worst)};
}

// Volume-average dual basis.
Outcome criterion3() {
  bool det_ok = true, bio_ok = true;
  std::string detail;
  for (int m = 1; m <= 6; ++m) {
    const DualBasisVolPoly b = build_volpoly_dual_basis(m);
    const double stated = stated_volpoly_determinant(m);
    const double rel = std::abs(b.det - stated) / std::abs(stated);
    const Biorthogonality bo = check_biorthogonality(b);
    det_ok = det_ok && rel <= 1e-8;
    bio_ok = bio_ok && std::max(bo.max_error_1d, bo.max_error_2d) <= 1e-10;
    detail += fmt(" m=%d det=%.6g stated=%.6g superfactorial=%.6g bio=%.1e;", m, b.det, stated,
                  superfactorial_determinant(m), std::max(bo.max_error_1d, bo.max_error_2d));
  }
  detail = fmt("determinant %s, biorthogonality %s:", det_ok ? "ok" : "mismatch", bio_ok ? "ok" : "broken") + detail;
  return {det_ok && bio_ok, detail};
}

double max_coeff_diff(const VectorField& a, const VectorField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.u.coeffs().size(); ++i) {
    d = std::max(d, std::abs(a.u.coeffs()[i] - b.u.coeffs()[i]));
    d = std::max(d, std::abs(a.v.coeffs()[i] - b.v.coeffs()[i]));
  }
  return d;
}

// Leray projection, Parseval, skew-symmetry of the nonlinear term.
Outcome criterion4() {
  const Grid g(128);
  const VectorField w(random_field(g, 60, 11), random_field(g, 60, 12));
  const VectorField pw = leray(w);
  const double scale = sobolev_norm(w, 0) / kTwoPi;
  const double idem = max_coeff_diff(leray(pw), pw) / scale;
  const double div = divergence_residual(pw);

  const SpectralField f = random_field(g, 60, 13);
  const std::vector<double> x = f.to_physical();
  double s = 0.0;
  for (double v : x) s += v * v;
  s *= g.dx() * g.dx();
  const double parseval = std::abs(s - std::pow(sobolev_norm(f, 0), 2)) / s;

  const VectorField u = leray(VectorField(random_field(g, 63, 14), random_field(g, 63, 15)));
  const VectorField n = nonlinear_term(u);
  const double orth = std::abs(l2_inner(n, u)) / (sobolev_norm(n, 0) * sobolev_norm(u, 0));

  const bool pass = idem <= 1e-12 && div <= 1e-12 && parseval <= 1e-10 && orth <= 1e-10;
  return {pass, fmt("idempotence %.2e, divergence %.2e, parseval %.2e, skew %.2e", idem, div, parseval, orth)};
}

// Linear exactness and time-step convergence.
Outcome criterion5() {
  const Grid g(64);
  const DissipationSymbol sym{0.05, 0.002, 1.0};
  const NavierStokes lin(g, sym, VectorField(g));
  double worst = 0.0;
  const int modes[][2] = {{1, 0}, {0, 1}, {1, 1}, {2, -3}, {5, 7}, {-9, 4}};
  for (const auto& k : modes) {
    VectorField u(g);
    // Amplitude orthogonal to k keeps the mode solenoidal.
    const double kx = k[0], ky = k[1], r = std::hypot(kx, ky);
    u.u.mode(k[0], k[1]) = Complex(-ky / r, 0.0);
    u.v.mode(k[0], k[1]) = Complex(kx / r, 0.0);
    u.u.mode(-k[0], -k[1]) = std::conj(u.u.mode(k[0], k[1]));
    u.v.mode(-k[0], -k[1]) = std::conj(u.v.mode(k[0], k[1]));
    const double dt = 0.01;
    const int steps = 200;
    VectorField w = u;
    for (int s = 0; s < steps; ++s) w = lin.step(w, dt);
    const double exact = std::exp(-sym(kx * kx + ky * ky) * dt * steps);
    worst = std::max(worst, std::abs(w.u.mode(k[0], k[1]) - exact * u.u.mode(k[0], k[1])) / exact);
    worst = std::max(worst, std::abs(w.v.mode(k[0], k[1]) - exact * u.v.mode(k[0], k[1])) / exact);
  }

  const double nu = 0.05;
  const NavierStokes ns(g, {nu, 0.0, 0.0}, forcing_for_grashof(g, nu, 50.0, 2));
  VectorField u0 = random_velocity(g, 6, 2.0, 3);
  dealias(u0);
  auto run = [&](int steps) {
    VectorField w = u0;
    for (int s = 0; s < steps; ++s) w = ns.step(w, 1.0 / steps);
    return w;
  };
  const VectorField ref = run(3200);
  const double e1 = sobolev_norm(run(100) - ref, 0), e2 = sobolev_norm(run(200) - ref, 0),
               e3 = sobolev_norm(run(400) - ref, 0);
  const double r1 = e1 / e2, r2 = e2 / e3;
  const bool pass = worst <= 1e-10 && std::abs(r1 - 4.0) <= 0.5 && std::abs(r2 - 4.0) <= 0.5;
  return {pass, fmt("single-mode decay error %.2e, dt-halving ratios %.3f %.3f", worst, r1, r2)};
}

// Absorbing ball over 200 eddy turnovers.
Outcome criterion6() {
  bool pass = true;
  std::string detail;
  const Grid g(128);
  const double nu = 0.1;
  for (double G : {10.0, 50.0}) {
    const ForcingSpec fs(forcing_for_grashof(g, nu, G, 2), nu, 2);
    const NavierStokes ns(g, {nu, 0.0, 0.0}, fs.f);
    SolverState st(random_velocity(g, 4, 4.0 * G * nu, 7), 0.0);
    const double turnover = 4.0 * kPi * kPi / (nu * G);
    SpinUpOptions opt;
    opt.k = 2;
    opt.save_interval = turnover / 10.0;
    opt.dt.dt_max = 0.2;
    const AbsorbingBallReport rep = spin_up(ns, fs, st, 200.0 * turnover, opt);
    double worst = 0.0;
    for (const auto& row : rep.series)
      if (row.t >= 0.5 * st.t) worst = std::max(worst, row.norms[1] / nu);
    const bool ok = rep.absorbed && worst <= 2.0 * G;
    pass = pass && ok;
    detail += fmt(" G=%g: %s at t0=%.1f, max H1/nu over final half %.3f (bound %.0f);", G, rep.status().c_str(),
                  rep.t0, worst, 2.0 * G);
  }
  return {pass, detail};
}

ExperimentConfig base_assimilation() {
  ExperimentConfig c;
  c.n = 128;
  c.nu = 0.1;
  c.forcing.kind = "kolmogorov";
  c.forcing.grashof = 50.0;
  c.spinup = 20.0;
  c.floor = 1e-9;
  c.safety = 10.0;
  c.seed = 1;
  return c;
}

std::string fit_text(const ExperimentResult& r, int l) {
  const DecayFit& f = r.fits.at(l);
  return fmt("e%d rate %.4g over [%.2f, %.2f] (%s)", l, f.rate, f.t_a, f.t_b, f.status().c_str());
}

// H1 synchronization with volume elements.
Outcome criterion7() {
  ExperimentConfig c = base_assimilation();
  c.interpolant = "volavg0";
  c.cover.cells = 16;
  c.mode = "uniform";
  c.horizon = 3.0;
  c.track = 1;
  const ExperimentResult r = run_experiment(c);
  const bool rate = r.fits.at(1).rate >= 0.9 * r.mu / 2.0;
  const bool cond = r.conditions.pass();
  return {rate && cond, fmt("mu=%.4g, %s vs 0.9 mu/2=%.4g (%s); conditions %s (mu h^2/nu=%.4g)", r.mu,
                            fit_text(r, 1).c_str(), 0.9 * r.mu / 2.0, rate ? "ok" : "short",
                            cond ? "pass" : "fail", r.conditions.item("wellposed-uniform").lhs)};
}

// Higher-order synchronization with Lagrange(2), then level 3 with hyperdissipation.
Outcome criterion8() {
  ExperimentConfig c = base_assimilation();
  c.interpolant = "lagrange:2";
  c.cover.cells = 16;
  c.mode = "uniform";
  c.horizon = 3.0;
  c.track = 2;
  const ExperimentResult a = run_experiment(c);
  c.gamma = 0.01;
  c.p = 1.0;
  c.track = 3;
  const ExperimentResult b = run_experiment(c);
  const bool ok2 = a.fits.at(2).rate >= 0.9 * a.mu / 2.0;
  const std::vector<double>& first = b.series.front().e;
  double last3 = first[3];
  for (const auto& row : b.series)
    if (row.t <= b.fits.at(3).t_b + 1e-12) last3 = row.e[3];
  const bool ok3 = b.fits.at(3).rate > 0.0 && last3 <= 1e-6 * first[3];
  return {ok2 && ok3, fmt("mu=%.4g, %s vs %.4g; hyper (gamma=0.01, p=1): %s, drop %.1e", a.mu, fit_text(a, 2).c_str(),
                          0.9 * a.mu / 2.0, fit_text(b, 3).c_str(), last3 / first[3])};
}

// Optimal interpolation with the uniform optimal condition enforced.
Outcome criterion9() {
  bool pass = true;
  std::string detail;
  for (int k : {1, 2}) {
    ExperimentConfig c = base_assimilation();
    c.interpolant = fmt("lagrange:%d", k);
    c.cover.cells = 32;
    c.mode = "optimal";
    c.horizon = 40.0;
    c.save_interval = 0.1;
    const double h = uniform_cover(c.cover.cells, c.cover.collar_fraction).max_diameter();
    c.mu = 0.99 * 0.1 / c.safety * c.nu / (h * h);
    const ExperimentResult r = run_experiment(c);
    const ConditionItem& item = r.conditions.item("optimal-uniform");
    const bool ok = item.pass && r.fits.at(k).rate >= 0.9 * r.mu / 2.0;
    pass = pass && ok;
    detail += fmt(" lagrange:%d mu=%.4g condition %s (%.4g <= %.4g), %s vs %.4g;", k, r.mu, item.pass ? "pass" : "fail",
                  item.lhs, item.rhs / c.safety, fit_text(r, k).c_str(), 0.9 * r.mu / 2.0);
  }
  return {pass, detail};
}

// Negative controls.
Outcome criterion10() {
  ExperimentConfig c = base_assimilation();
  c.interpolant = "volavg0";
  c.cover.cells = 16;
  c.mode = "h1-baseline";
  c.horizon = 40.0;
  c.save_interval = 0.1;
  c.mu = 0.0;
  c.track = 1;
  const ExperimentResult r = run_experiment(c);
  const double mu_ref = r.conditions.mu_min;
  const bool ok = r.fits.at(1).rate <= 0.05 * mu_ref / 2.0;

  ExperimentConfig g = c;
  g.cover.cells = 4;
  const double h = uniform_cover(g.cover.cells, g.cover.collar_fraction).max_diameter();
  g.mu = 10.0 * g.nu / (h * h);
  const ExperimentResult v = run_experiment(g);
  return {ok, fmt("mu=0: %s vs 0.05 mu_ref/2=%.4g; coarse 4x4, mu h^2/nu=10 (mu=%.4g): %s, mu/2=%.4g (logged)",
                  fit_text(r, 1).c_str(), 0.05 * mu_ref / 2.0, v.mu, fit_text(v, 1).c_str(), v.mu / 2.0)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                     criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.1f s)%s\n", id, o.pass ? "PASS" : "FAIL", secs,
                (" " + o.detail).c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
