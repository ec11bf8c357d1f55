#include <doctest.h>

#include <cstdlib>

#include "mfda/config.hpp"

using namespace mfda;

TEST_SUITE("config") {
  TEST_CASE("parse with comments and origins") {
    const Config c = Config::parse("# header\nn = 64\n\nnu = 0.05  # viscosity\ninterpolant = lagrange:2\n", "run.cfg");
    CHECK(c.get_int("n", 0) == 64);
    CHECK(c.get_double("nu", 0.0) == 0.05);
    CHECK(c.get("interpolant", "") == "lagrange:2");
    CHECK(c.entries().at("nu").origin == "run.cfg:4");
    CHECK(c.get_double("gamma", 0.25) == 0.25);
  }

  TEST_CASE("syntax errors name the line") {
    try {
      Config::parse("n = 64\nbroken line\n", "a.cfg");
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("a.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("n = 1\nn = 2\n"), ConfigError);
  }

  TEST_CASE("unknown keys are named") {
    const Config c = Config::parse("n = 64\nviscosity = 0.1\n", "b.cfg");
    try {
      c.check_known(experiment_keys());
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      const std::string w = e.what();
      CHECK(w.find("viscosity") != std::string::npos);
      CHECK(w.find("b.cfg:2") != std::string::npos);
    }
  }

  TEST_CASE("typed values are validated") {
    const Config c = Config::parse("n = sixty\nnu = 0.1x\nlog_observations = maybe\n", "c.cfg");
    CHECK_THROWS_AS(c.get_int("n", 0), ConfigError);
    CHECK_THROWS_AS(c.get_double("nu", 0.0), ConfigError);
    CHECK_THROWS_AS(c.get_bool("log_observations", false), ConfigError);
    CHECK_THROWS_AS(experiment_from_config(Config::parse("nu = -1\n")), ConfigError);
    CHECK_THROWS_AS(experiment_from_config(Config::parse("n = 7\n")), ConfigError);
  }

  TEST_CASE("environment overrides") {
    Config c = Config::parse("cover.cells = 8\n");
    ::setenv("MFDATEST_COVER_CELLS", "32", 1);
    c.apply_env("MFDATEST_", experiment_keys());
    ::unsetenv("MFDATEST_COVER_CELLS");
    CHECK(c.get_int("cover.cells", 0) == 32);
    CHECK(c.entries().at("cover.cells").origin == "env:MFDATEST_COVER_CELLS");
  }

  TEST_CASE("echo round trips through the parser") {
    ExperimentConfig e;
    e.nu = 0.037;
    e.cover.cells = 12;
    e.interpolant = "volpoly:2";
    std::string text;
    for (const auto& [k, v] : experiment_echo(e)) text += k + " = " + v + "\n";
    const ExperimentConfig back = experiment_from_config(Config::parse(text));
    CHECK(back.nu == e.nu);
    CHECK(back.cover.cells == 12);
    CHECK(back.interpolant == "volpoly:2");
    CHECK(experiment_echo(back) == experiment_echo(e));
  }
}
