#include "mfda/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mfda {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(number);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "' (first at " + c.entries_[key].origin + ")");
    c.entries_[key] = {value, where};
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
  entries_[key] = {value, origin};
}

void Config::fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  const std::string where = it == entries_.end() ? "" : it->second.origin + ": ";
  throw ConfigError(where + "key '" + key + "': " + what);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entries_.at(key).value;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) fail(key, "trailing characters in number '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    fail(key, "expected a number, got '" + v + "'");
  }
}

long long Config::get_int(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entries_.at(key).value;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) fail(key, "expected an integer, got '" + v + "'");
    return i;
  } catch (const std::logic_error&) {
    fail(key, "expected an integer, got '" + v + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entries_.at(key).value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(key, "expected a boolean, got '" + v + "'");
}

void Config::apply_env(const std::string& prefix, const std::set<std::string>& known) {
  for (const auto& key : known) {
    std::string name = prefix;
    for (char ch : key) name += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = std::getenv(name.c_str())) set(key, trim(v), "env:" + name);
  }
}

void Config::check_known(const std::set<std::string>& known) const {
  for (const auto& [key, e] : entries_)
    if (!known.count(key)) throw ConfigError(e.origin + ": unknown key '" + key + "'");
}

const std::set<std::string>& experiment_keys() {
  static const std::set<std::string> keys = {
      "n",           "nu",           "gamma",         "p",
      "forcing.kind", "forcing.grashof", "forcing.kf",  "forcing.kmin",
      "forcing.kmax", "cover.kind",   "cover.cells",   "cover.levels",
      "cover.collar_fraction", "cover.path", "interpolant", "smoothness",
      "mu",          "mu_factor",    "spinup",        "horizon",
      "save_interval", "dt_max",     "cfl",           "seed",
      "observer_init", "track",      "mode",          "safety",
      "floor",       "ensemble",     "log_observations"};
  return keys;
}

ExperimentConfig experiment_from_config(const Config& c) {
  ExperimentConfig e;
  e.n = static_cast<int>(c.get_int("n", e.n));
  e.nu = c.get_double("nu", e.nu);
  e.gamma = c.get_double("gamma", e.gamma);
  e.p = c.get_double("p", e.p);
  e.forcing.kind = c.get("forcing.kind", e.forcing.kind);
  e.forcing.grashof = c.get_double("forcing.grashof", e.forcing.grashof);
  e.forcing.kf = static_cast<int>(c.get_int("forcing.kf", e.forcing.kf));
  e.forcing.kmin = static_cast<int>(c.get_int("forcing.kmin", e.forcing.kmin));
  e.forcing.kmax = static_cast<int>(c.get_int("forcing.kmax", e.forcing.kmax));
  e.cover.kind = c.get("cover.kind", e.cover.kind);
  e.cover.cells = static_cast<int>(c.get_int("cover.cells", e.cover.cells));
  e.cover.levels = static_cast<int>(c.get_int("cover.levels", e.cover.levels));
  e.cover.collar_fraction = c.get_double("cover.collar_fraction", e.cover.collar_fraction);
  e.cover.path = c.get("cover.path", e.cover.path);
  e.interpolant = c.get("interpolant", e.interpolant);
  e.smoothness = static_cast<int>(c.get_int("smoothness", e.smoothness));
  e.mu = c.get_double("mu", e.mu);
  e.mu_factor = c.get_double("mu_factor", e.mu_factor);
  e.spinup = c.get_double("spinup", e.spinup);
  e.horizon = c.get_double("horizon", e.horizon);
  e.save_interval = c.get_double("save_interval", e.save_interval);
  e.dt_max = c.get_double("dt_max", e.dt_max);
  e.cfl = c.get_double("cfl", e.cfl);
  const long long seed = c.get_int("seed", static_cast<long long>(e.seed));
  if (seed < 0) throw ConfigError("key 'seed': must be non-negative");
  e.seed = static_cast<unsigned long long>(seed);
  e.observer_init = c.get("observer_init", e.observer_init);
  e.track = static_cast<int>(c.get_int("track", e.track));
  e.mode = c.get("mode", e.mode);
  e.safety = c.get_double("safety", e.safety);
  e.floor = c.get_double("floor", e.floor);
  e.ensemble = static_cast<int>(c.get_int("ensemble", e.ensemble));
  e.log_observations = c.get_bool("log_observations", e.log_observations);
  auto positive = [&](const char* key, double v) {
    if (!(v > 0.0)) throw ConfigError("key '" + std::string(key) + "': must be positive");
  };
  positive("nu", e.nu);
  positive("horizon", e.horizon);
  positive("save_interval", e.save_interval);
  positive("dt_max", e.dt_max);
  positive("cfl", e.cfl);
  positive("floor", e.floor);
  if (e.n < 8 || e.n % 2 != 0) throw ConfigError("key 'n': must be an even number of at least 8");
  if (e.gamma < 0.0 || e.p < 0.0) throw ConfigError("key 'gamma'/'p': must be non-negative");
  if (e.spinup < 0.0) throw ConfigError("key 'spinup': must be non-negative");
  return e;
}

std::map<std::string, std::string> experiment_echo(const ExperimentConfig& e) {
  return {{"n", std::to_string(e.n)},
          {"nu", fmt(e.nu)},
          {"gamma", fmt(e.gamma)},
          {"p", fmt(e.p)},
          {"forcing.kind", e.forcing.kind},
          {"forcing.grashof", fmt(e.forcing.grashof)},
          {"forcing.kf", std::to_string(e.forcing.kf)},
          {"forcing.kmin", std::to_string(e.forcing.kmin)},
          {"forcing.kmax", std::to_string(e.forcing.kmax)},
          {"cover.kind", e.cover.kind},
          {"cover.cells", std::to_string(e.cover.cells)},
          {"cover.levels", std::to_string(e.cover.levels)},
          {"cover.collar_fraction", fmt(e.cover.collar_fraction)},
          {"cover.path", e.cover.path},
          {"interpolant", e.interpolant},
          {"smoothness", std::to_string(e.smoothness)},
          {"mu", fmt(e.mu)},
          {"mu_factor", fmt(e.mu_factor)},
          {"spinup", fmt(e.spinup)},
          {"horizon", fmt(e.horizon)},
          {"save_interval", fmt(e.save_interval)},
          {"dt_max", fmt(e.dt_max)},
          {"cfl", fmt(e.cfl)},
          {"seed", std::to_string(e.seed)},
          {"observer_init", e.observer_init},
          {"track", std::to_string(e.track)},
          {"mode", e.mode},
          {"safety", fmt(e.safety)},
          {"floor", fmt(e.floor)},
          {"ensemble", std::to_string(e.ensemble)},
          {"log_observations", e.log_observations ? "true" : "false"}};
}

}  // namespace mfda
