#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfda/assimilation.hpp"

namespace mfda {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "key = value" lines; '#' starts a comment. Keys keep the line they came from.
class Config {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "file:line", "env:NAME" or "override"
  };

  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, const std::string& value, const std::string& origin = "override");
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // PREFIX + key upper-cased with '.' mapped to '_', for every known key.
  void apply_env(const std::string& prefix, const std::set<std::string>& known);
  // Throws on the first key not in known, naming it and its origin.
  void check_known(const std::set<std::string>& known) const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  std::map<std::string, Entry> entries_;
};

const std::set<std::string>& experiment_keys();
ExperimentConfig experiment_from_config(const Config& c);
// Flat key/value echo of the effective settings.
std::map<std::string, std::string> experiment_echo(const ExperimentConfig& e);

}  // namespace mfda
