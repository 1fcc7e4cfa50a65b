#include <cstdlib>

#include "doctest.h"

#include "capsim/config.hpp"

using namespace capsim;

TEST_CASE("empty config gives the default acceptance scenario") {
  ExperimentConfig cfg = parse_config_text("   \n  ");
  CHECK(cfg.thetas == std::vector<double>{kPi / 2});
  CHECK(cfg.omegas_free == std::vector<double>{1.0});
  CHECK(cfg.gamma == 0.0);
  CHECK(cfg.mu == 0.1);
  CHECK(cfg.w == 0.5);
  CHECK(cfg.n_nodes == 4096);
  CHECK(cfg.flow.dt == 2e-3);
  CHECK(cfg.flow.t_end == 40.0);
  CHECK(cfg.flow.scheme == Scheme::RK4);
  CHECK(cfg.flow.renorm_every == 16);
  CHECK(cfg.oracle_n_theta == 512);
  CHECK(cfg.raster_n_theta == 1024);
}

TEST_CASE("minimal config solves the Gauss level") {
  ExperimentConfig cfg =
      parse_config_text(R"({"cap": {"thetas": [1.5707963267948966], "omegas_free": [1.0]}})");
  ZonalCap cap = cfg.cap();
  CHECK(cap.omegas[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"cap": {"theta": [1.0]}})"),
                       doctest::Contains("cap.theta"), ParseError);
  CHECK_THROWS_AS(parse_config_text(R"({"caps": {}})"), ParseError);
  CHECK_THROWS_AS(parse_config_text("{不是json"), ParseError);
}

TEST_CASE("validation lists the offending section") {
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"cap": {"thetas": [1.0, 0.5], "omegas_free": [1.0, 1.0]}})"),
      doctest::Contains("cap.thetas"), ValidationError);
  CHECK_THROWS_AS(parse_config_text(R"({"flow": {"dt": -1.0}})"), ValidationError);
}

TEST_CASE("parse-emit round trip is field identical") {
  std::string text = R"({
    "cap": {"thetas": [1.0, 2.0], "omegas_free": [0.5, 0.2], "gamma": 0.1},
    "bump": {"mu": -0.05, "w": 0.3, "n_nodes": 256},
    "flow": {"dt": 0.01, "t_end": 2.0, "scheme": "rk2", "stride": 10},
    "tolerances": {"theorem_mode": false},
    "seed": 42
  })";
  ExperimentConfig a = parse_config_text(text);
  ExperimentConfig b = config_from_json(emit_config(a));
  CHECK(emit_config(a) == emit_config(b));
  CHECK(a.flow.scheme == Scheme::RK2);
  CHECK(b.seed == 42);
}

TEST_CASE("csv numbers round trip at 17 significant digits") {
  for (double v : {1.0 / 3.0, kPi, -2.2250738585072014e-308, 0.1, 123456789.123456789}) {
    std::string s = csv_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}
