// mfda: simulate | assimilate | interp-study | verify
//
// Exit codes: 0 success (outside-regime runs included), 1 configuration error,
// 2 numerical abort, 3 verification failure.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "mfda/assimilation.hpp"
#include "mfda/config.hpp"
#include "mfda/dual_basis.hpp"
#include "mfda/fit.hpp"
#include "mfda/global_interp.hpp"
#include "mfda/nse.hpp"
#include "mfda/pou.hpp"
#include "mfda/snapshot.hpp"

#ifndef MFDA_VERSION
#define MFDA_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mfda;

namespace {

enum Exit { kOk = 0, kConfig = 1, kAbort = 2, kVerify = 3 };

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::string>& extra_defaults() {
  static const std::map<std::string, std::string> d = {
      {"simulate.k", "2"},          {"simulate.window", "20"},  {"study.kinds", "volavg0,lagrange:2"},
      {"study.cells", "8,16,32,64"}, {"study.band", "1"},        {"study.field_n", "64"},
      {"study.points", "4"},        {"study.lmax", "3"},        {"verify.n", "128"}};
  return d;
}

std::set<std::string> known_keys() {
  std::set<std::string> k = experiment_keys();
  for (const auto& [key, v] : extra_defaults()) k.insert(key);
  return k;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> int_list(const Config& c, const std::string& key) {
  std::vector<int> out;
  for (const auto& v : split(c.get(key, extra_defaults().at(key)), ',')) {
    try {
      out.push_back(std::stoi(v));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a comma-separated integer list");
    }
  }
  return out;
}

// One job: a command, its effective configuration and an output directory.
struct Job {
  std::string command;
  Config config;
  fs::path out;
  std::vector<std::string> files;
  json summary = json::object();
};

json config_echo(const Job& job) {
  json j = json::object();
  const ExperimentConfig e = experiment_from_config(job.config);
  for (const auto& [k, v] : experiment_echo(e)) j[k] = v;
  for (const auto& [k, v] : extra_defaults()) j[k] = job.config.get(k, v);
  return j;
}

void write_manifest(const Job& job, const std::string& started, int code) {
  json m;
  m["command"] = job.command;
  m["version"] = MFDA_VERSION;
  m["seed"] = job.config.get("seed", "1");
  m["config"] = config_echo(job);
  json origins = json::object();
  for (const auto& [k, e] : job.config.entries()) origins[k] = e.origin;
  m["origins"] = origins;
  m["started"] = started;
  m["finished"] = utc_now();
  m["exit_code"] = code;
  m["summary"] = job.summary;
  json files = json::array();
  for (const auto& f : job.files) files.push_back({{"path", f}, {"sha256", sha256_file(job.out / f)}});
  m["files"] = files;
  write_text(job.out / "manifest.json", m.dump(2) + "\n");
}

void emit(Job& job, const std::string& name, const std::string& content) {
  write_text(job.out / name, content);
  job.files.push_back(name);
}

// simulate: spin-up trajectory with absorbing-ball monitoring.
int run_simulate(Job& job) {
  const ExperimentConfig e = experiment_from_config(job.config);
  const int k = static_cast<int>(job.config.get_int("simulate.k", 2));
  const int window = static_cast<int>(job.config.get_int("simulate.window", 20));
  const Grid grid(e.n);
  const VectorField f = build_forcing(grid, e.nu, e.forcing, e.seed);
  const ForcingSpec spec(f, e.nu, std::max(k, 1));
  const DissipationSymbol sym{e.nu, e.gamma, e.p};
  const NavierStokes ns(grid, sym, spec.f);
  const double scale = std::max(spec.grashof, 1.0) * e.nu;
  SolverState state(random_velocity(grid, 4, scale, e.seed), 0.0);
  emit(job, "initial.snap", [&] {
    std::ostringstream os;
    write_snapshot(os, make_snapshot(state.u, "velocity", 0.0, sym));
    return os.str();
  }());
  SpinUpOptions opt;
  opt.k = k;
  opt.save_interval = e.save_interval;
  opt.window = window;
  opt.dt = {e.cfl, e.dt_max, 0.0, 0.0};
  const AbsorbingBallReport rep = spin_up(ns, spec, state, e.horizon, opt);
  std::ostringstream csv;
  write_series_csv(csv, rep.series, k);
  emit(job, "series.csv", csv.str());
  std::ostringstream snap;
  write_snapshot(snap, make_snapshot(state.u, "velocity", state.t, sym));
  emit(job, "final.snap", snap.str());
  json ball;
  ball["status"] = rep.status();
  ball["t0"] = rep.t0;
  ball["grashof"] = spec.grashof;
  ball["radius"] = rep.radius;
  ball["max_ratio"] = rep.max_ratio;
  emit(job, "absorbing_ball.json", ball.dump(2) + "\n");
  job.summary = ball;
  std::cerr << "simulate: " << rep.status() << ", G = " << fmt(spec.grashof) << "\n";
  return kOk;
}

// assimilate: coupled truth/observer run with decay fits.
int run_assimilate(Job& job) {
  const ExperimentConfig e = experiment_from_config(job.config);
  const ExperimentResult r = run_experiment(e);
  emit(job, "series.csv", r.series_csv());
  emit(job, "fits.json", r.fits_json() + "\n");
  emit(job, "conditions.json", r.conditions.to_json() + "\n");
  if (e.log_observations) {
    std::ostringstream os;
    r.log.write(os);
    emit(job, "observations.log", os.str());
  }
  job.summary = json::parse(r.fits_json());
  std::cerr << "assimilate: mu = " << fmt(r.mu) << (r.outside_regime ? ", outside sufficient regime" : "")
            << "\n";
  return kOk;
}

// interp-study: global error ladder and fitted slopes.
int run_study(Job& job) {
  const ExperimentConfig e = experiment_from_config(job.config);
  const std::vector<int> cells = int_list(job.config, "study.cells");
  if (cells.size() < 2) throw ConfigError("key 'study.cells': need at least two cover sizes");
  const int band = static_cast<int>(job.config.get_int("study.band", 1));
  const int field_n = static_cast<int>(job.config.get_int("study.field_n", 64));
  const int points = static_cast<int>(job.config.get_int("study.points", 4));
  const int lmax = static_cast<int>(job.config.get_int("study.lmax", 3));
  const Grid grid(field_n);
  const SpectralField phi = random_field(grid, band, e.seed);
  const SpectralSource src(phi);
  std::ostringstream errors, slopes;
  errors << "interpolant,cells,h,l,error\n";
  slopes << "interpolant,l,slope,residual,points\n";
  json table = json::object();
  for (const auto& spec : split(job.config.get("study.kinds", extra_defaults().at("study.kinds")), ',')) {
    const LocalInterpolant op = LocalInterpolant::parse(spec);
    const int L = std::min(op.order, lmax);
    std::vector<double> h;
    std::vector<std::vector<double>> err(L + 1);
    for (int c : cells) {
      const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(c, e.cover.collar_fraction), op, e.smoothness);
      const GlobalNorms nr = global_norms(I, src, L, points);
      h.push_back(I.cover().max_diameter());
      for (int l = 0; l <= L; ++l) {
        err[l].push_back(nr.error[l]);
        errors << spec << ',' << c << ',' << fmt(h.back()) << ',' << l << ',' << fmt(nr.error[l]) << '\n';
      }
    }
    json row = json::array();
    for (int l = 0; l <= L; ++l) {
      const LineFit f = loglog_fit(h, err[l]);
      slopes << spec << ',' << l << ',' << fmt(f.slope) << ',' << fmt(f.residual) << ',' << f.points << '\n';
      row.push_back(f.points >= 2 ? json(f.slope) : json(nullptr));
    }
    table[spec] = row;
  }
  emit(job, "errors.csv", errors.str());
  emit(job, "slopes.csv", slopes.str());
  job.summary = table;
  return kOk;
}

// verify: partition axioms, overlap bounds, unisolvence, projection health.
int run_verify(Job& job) {
  const ExperimentConfig e = experiment_from_config(job.config);
  const int n = static_cast<int>(job.config.get_int("verify.n", 128));
  std::ostringstream csv;
  csv << "check,subject,value,tolerance,pass\n";
  bool all = true;
  auto row = [&](const std::string& check, const std::string& subject, double value, double tol, bool pass) {
    csv << check << ',' << subject << ',' << fmt(value) << ',' << fmt(tol) << ',' << (pass ? "true" : "false") << '\n';
    all = all && pass;
  };

  std::vector<std::pair<std::string, Cover>> covers;
  if (job.config.has("cover.kind")) {
    covers.emplace_back(e.cover.kind, build_cover(e.cover));
  } else {
    for (int c : {4, 8, 16}) covers.emplace_back("uniform-" + std::to_string(c), uniform_cover(c, e.cover.collar_fraction));
    covers.emplace_back("dyadic-2", dyadic_cover(2, e.cover.collar_fraction));
  }
  for (const auto& [name, cover] : covers) {
    try {
      const PouReport r = check_pou(build_pou(cover, e.smoothness), n);
      row("partition-sum", name, r.sum_max_deviation, 1e-12, r.sum_max_deviation <= 1e-12);
      row("plateau", name, r.plateau_exact ? 0.0 : 1.0, 0.0, r.plateau_exact);
      row("support", name, r.support_exact ? 0.0 : 1.0, 0.0, r.support_exact);
    } catch (const PouConstructionError& err) {
      std::cerr << "verify: " << name << ": " << err.what() << "\n";
      row("partition-sum", name, 1.0, 1e-12, false);
    }
    const AnalyticSource one = constant_source(1.0);
    const OverlapIntegralReport ov = check_overlap_integral(cover, one);
    row("overlap-sandwich", name, ov.integral, 0.0, ov.holds);
    const MultiplicityReport mult = partition_multiplicity(cover);
    row("multiplicity-sandwich", name, mult.multiplicity, 0.0, mult.sandwich_holds);
  }
  for (int m = 1; m <= 6; ++m) {
    const DualBasisVolPoly b = build_volpoly_dual_basis(m);
    const Biorthogonality bo = check_biorthogonality(b);
    const double bio = std::max(bo.max_error_1d, bo.max_error_2d);
    row("biorthogonality", "m=" + std::to_string(m), bio, 1e-10, bio <= 1e-10);
    const double sf = superfactorial_determinant(m);
    row("determinant", "m=" + std::to_string(m), b.det, sf, std::abs(b.det - sf) <= 1e-8 * sf);
    // Informational: the closed form (1/m!) prod (k - l) differs for m >= 2.
    csv << "determinant-closed-form,m=" << m << ',' << fmt(stated_volpoly_determinant(m)) << ",0,info\n";
  }
  const Grid g(64);
  const VectorField w(random_field(g, 20, e.seed), random_field(g, 20, e.seed + 1));
  const VectorField p = leray(w);
  const double idem = sobolev_norm(leray(p) - p, 0) / sobolev_norm(w, 0);
  row("leray-idempotence", "n=64", idem, 1e-12, idem <= 1e-12);
  row("leray-divergence", "n=64", divergence_residual(p), 1e-12, divergence_residual(p) <= 1e-12);
  const VectorField nl = nonlinear_term(p);
  const double skew = std::abs(l2_inner(nl, p)) / (sobolev_norm(nl, 0) * sobolev_norm(p, 0));
  row("advection-skew", "n=64", skew, 1e-10, skew <= 1e-10);

  emit(job, "verify.csv", csv.str());
  job.summary = {{"pass", all}};
  std::cerr << "verify: " << (all ? "all checks pass" : "failures reported in verify.csv") << "\n";
  return all ? kOk : kVerify;
}

int dispatch(Job& job) {
  if (job.command == "simulate") return run_simulate(job);
  if (job.command == "assimilate") return run_assimilate(job);
  if (job.command == "interp-study") return run_study(job);
  return run_verify(job);
}

int run_job(Job job) {
  const std::string started = utc_now();
  int code = kOk;
  try {
    fs::create_directories(job.out);
    code = dispatch(job);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    code = kAbort;
  } catch (const ResolutionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
  write_manifest(job, started, code);
  return code;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return out;
}

// "a=1,2;b=x,y" -> cartesian product of assignments.
std::vector<std::vector<std::pair<std::string, std::string>>> expand_sweep(const std::string& spec) {
  std::vector<std::vector<std::pair<std::string, std::string>>> combos{{}};
  for (const auto& part : split(spec, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep: expected 'key=v1,v2' in '" + part + "'");
    const std::string key = part.substr(0, eq);
    const std::vector<std::string> values = split(part.substr(eq + 1), ',');
    if (values.empty()) throw ConfigError("--sweep: no values for '" + key + "'");
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& c : combos)
      for (const auto& v : values) {
        auto d = c;
        d.emplace_back(key, v);
        next.push_back(d);
      }
    combos = std::move(next);
  }
  return combos;
}

int run_sweep(const Job& base, const std::string& spec) {
  const auto combos = expand_sweep(spec);
  const std::set<std::string> known = known_keys();
  for (const auto& [k, v] : combos.front())
    if (!known.count(k)) throw ConfigError("--sweep: unknown key '" + k + "'");
  const unsigned slots = std::max(1u, std::thread::hardware_concurrency());
  std::vector<pid_t> running;
  int worst = kOk;
  auto reap = [&]() {
    int status = 0;
    const pid_t pid = wait(&status);
    running.erase(std::remove(running.begin(), running.end(), pid), running.end());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kAbort;
    worst = std::max(worst, code);
  };
  json index = json::array();
  for (const auto& combo : combos) {
    Job job = base;
    std::string dir;
    for (const auto& [k, v] : combo) {
      job.config.set(k, v, "sweep");
      dir += (dir.empty() ? "" : "_") + sanitize(k) + "-" + sanitize(v);
    }
    job.out = base.out / dir;
    index.push_back({{"dir", dir}});
    while (running.size() >= slots) reap();
    std::cout.flush();
    std::cerr.flush();
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) _exit(run_job(std::move(job)));
    running.push_back(pid);
  }
  while (!running.empty()) reap();
  fs::create_directories(base.out);
  write_text(base.out / "sweep.json", json{{"sweep", spec}, {"jobs", index}}.dump(2) + "\n");
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meshfree data assimilation experiments for the 2D periodic Navier-Stokes equations"};
  app.require_subcommand(1);
  struct Options {
    std::string config, out = "mfda_out", sweep;
    long long seed = -1;
  };
  std::map<std::string, Options> opts;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Spin up the forced solver and monitor the absorbing ball"},
      {"assimilate", "Run the nudged observer against a reference solution"},
      {"interp-study", "Convergence ladder for interpolant families"},
      {"verify", "Partition, overlap, unisolvence and projection checks"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    Options& o = opts[name];
    sub->add_option("--config", o.config, "key = value configuration file");
    sub->add_option("--seed", o.seed, "Seed override");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--sweep", o.sweep, "Parameter grid, e.g. 'mu=1,2;cover.cells=8,16'");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const Options& o = opts[command];
  try {
    Job job;
    job.command = command;
    job.out = o.out;
    if (!o.config.empty()) job.config = Config::load(o.config);
    job.config.apply_env("MFDA_", known_keys());
    if (o.seed >= 0) job.config.set("seed", std::to_string(o.seed), "--seed");
    job.config.check_known(known_keys());
    experiment_from_config(job.config);
    if (!o.sweep.empty()) return run_sweep(job, o.sweep);
    return run_job(std::move(job));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
