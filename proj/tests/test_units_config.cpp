#include "doctest.h"
#include "spdc/errors.hpp"
#include "spdc/keyvalue.hpp"
#include "spdc/run_config.hpp"
#include "spdc/units.hpp"

using namespace spdc;

TEST_CASE("quantities convert to SI with their suffix") {
  CHECK(parse_quantity("600 MHz", Dimension::kFrequency) == doctest::Approx(600e6));
  CHECK(parse_quantity("250 ps", Dimension::kTime) == doctest::Approx(250e-12));
  CHECK(parse_quantity("3.1 %", Dimension::kDimensionless) == doctest::Approx(0.031));
  CHECK(parse_quantity("2.45e3 /(s MHz)", Dimension::kBrightness) == doctest::Approx(2.45e-3));
  CHECK(parse_quantity("50 uW", Dimension::kPower) == doctest::Approx(50e-6));
  CHECK(parse_quantity("8.2 um", Dimension::kLength) == doctest::Approx(8.2e-6));
  CHECK(parse_quantity("53 C", Dimension::kTemperature) == doctest::Approx(53.0));
  CHECK(parse_quantity("3 kHz", Dimension::kRate) == doctest::Approx(3000.0));
}

TEST_CASE("quantities without or with the wrong unit are rejected") {
  CHECK_THROWS_AS(parse_quantity("600", Dimension::kFrequency), ConfigError);
  CHECK_THROWS_AS(parse_quantity("600 ps", Dimension::kFrequency), ConfigError);
  CHECK_THROWS_AS(parse_quantity("fast MHz", Dimension::kFrequency), ConfigError);
}

TEST_CASE("angular and ordinary frequency convert in one place") {
  CHECK(angular_from_hz(600e6) == doctest::Approx(kTwoPi * 600e6));
  CHECK(hz_from_angular(angular_from_hz(240e6)) == doctest::Approx(240e6));
}

TEST_CASE("key-value documents report line numbers") {
  const auto doc = KeyValueDocument::parse("[a]\nx = 1 ns\n\n[b]\ny = 2\n");
  CHECK(doc.get_quantity("a", "x", Dimension::kTime) == doctest::Approx(1e-9));
  CHECK(doc.get_integer("b", "y") == 2);
  try {
    KeyValueDocument::parse("[a]\nx = 1\nx = 2\n");
    FAIL("duplicate key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(KeyValueDocument::parse("[a]\nnot a pair\n"), ConfigError);
}

TEST_CASE("canonical form and hash ignore comments and ordering") {
  const auto a = KeyValueDocument::parse("# comment\n[s]\nb = 2\na = 1\n");
  const auto b = KeyValueDocument::parse("[s]\na = 1\n; other\nb = 2\n");
  CHECK(fnv1a_hex(a.canonical()) == fnv1a_hex(b.canonical()));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("run config rejects unknown keys and sections") {
  CHECK_THROWS_AS(RunConfig::parse("[source]\nbrightness = 1 /(s MHz)\npump_power = 1 mW\ncolour = red\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[sauce]\nx = 1\n"), ConfigError);
  try {
    RunConfig::parse("[run]\nseed = 3\n\n[filter.signal]\nlinewidth = 600\n");
    FAIL("unitless linewidth accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("run config reads physical sections") {
  const auto cfg = RunConfig::parse(
      "[run]\nseed = 7\n[source]\nbrightness = 2.45e3 /(s MHz)\npump_power = 50 uW\npm_bandwidth = 539 GHz\n"
      "[filter.signal]\nlinewidth = 600 MHz\npopulations = 0.95, 0.025, 0.025\n"
      "[detector.idler]\nefficiency = 7.4 %\ndark_rate = 3 kHz\njitter = 125 ps\ndead_time = 20 us\n");
  CHECK(cfg.seed == 7);
  CHECK(cfg.source->op.pump_power_mw == doctest::Approx(0.05));
  CHECK(cfg.source->op.brightness == doctest::Approx(2.45e-3));
  CHECK(cfg.pm_bandwidth() == doctest::Approx(kTwoPi * 539e9));
  CHECK(cfg.filter_s->gamma == doctest::Approx(kTwoPi * 600e6));
  CHECK(cfg.filter_s->mode_populations.size() == 3);
  CHECK(cfg.det_i->dead_time == doctest::Approx(20e-6));
  CHECK(cfg.hash.size() == 16);
  CHECK_THROWS_AS(cfg.require_crystal(), ConfigError);
}

TEST_CASE("invalid physical values are config errors") {
  CHECK_THROWS_AS(RunConfig::parse("[detector.signal]\nefficiency = 130 %\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[filter.idler]\nlinewidth = 240 MHz\npopulations = 0.5, 0.2\n"), ConfigError);
}

TEST_CASE("unknown sections and keys are rejected before interpretation, first by line") {
  try {
    RunConfig::parse("[source]\nbrightness = 1 /(s MHz)\npump_pwr = 1 mW\n[extra]\nx = 1\n", ".");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("pump_pwr") != std::string::npos);
  }
  try {
    RunConfig::parse("[sourc]\nbrightness = 1 /(s MHz)\n", ".");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("[sourc]") != std::string::npos);
  }
  CHECK_NOTHROW(RunConfig::parse("[fit]\nmode = cross\ninput = h.csv\nchannel = idler\n", "."));
}
