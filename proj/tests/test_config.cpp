#include <doctest.h>

#include <fstream>

#include "perifract/config.hpp"
#include "perifract/errors.hpp"
#include "support.hpp"

using namespace perifract;

TEST_CASE("empty config is the full notched-plate experiment") {
  const RunConfig c = parse_config_string("");
  CHECK(c.material.E == 3.24e9);
  CHECK(c.material.Gc == 500.0);
  CHECK(c.material.rho == 1200.0);
  CHECK(c.material.nu == 0.25);
  CHECK(c.material.calibration == CalibrationMode::SelfConsistent);
  CHECK(c.domain.a == 0.1);
  CHECK(c.domain.b == 0.3);
  CHECK(c.domain.ell0 == 0.025);
  CHECK(c.domain.epsilon == 2.5e-3);
  CHECK(c.domain.h_ratio == 4);
  CHECK(c.domain.d == c.domain.epsilon);
  CHECK(c.domain.delta == c.domain.epsilon);
  CHECK(c.load.delta == c.domain.delta);
  CHECK(c.load.t_ramp == 350e-6);
  CHECK(c.time.t_end == 560e-6);
  CHECK(c.time.dt == 0.02e-6);
  CHECK(c.time.total_steps() == 28000);
  CHECK(c.warnings.empty());
  CHECK(c.box_half_widths().x == 4 * c.domain.epsilon);
  CHECK(c.material_model().mu == test_support::approx(1.296e9));
}

TEST_CASE("nu other than 1/4 is rejected") {
  try {
    parse_config_string("[material]\nnu = 0.3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "material.nu");
    CHECK(std::string(e.what()).find("bond-based model requires nu=0.25") != std::string::npos);
  }
}

TEST_CASE("dt above the stability bound warns") {
  const RunConfig c = parse_config_string("[time]\ndt = 1e-6\n");
  REQUIRE(c.warnings.size() == 1);
  CHECK(c.warnings[0].find("stability factor") != std::string::npos);
  const double h = c.domain.h();
  CHECK(c.time.stable_dt(h, c.material_model()) == test_support::approx(0.5 * h / 1800.0));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_config_string("[material]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[material\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("material.E\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[material]\nE = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[material]\nE = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[time]\noutput_every = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[domain]\nell0 = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[material]\ncalibration = paper\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[material]\nc = 392.7\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/perifract.ini"), ConfigError);
}

TEST_CASE("paper calibration takes the given constants") {
  const RunConfig c = parse_config_string("[material]\ncalibration = paper\nc = 392.7\nbeta = 1.3201e7\n");
  const MaterialModel m = c.material_model();
  CHECK(m.mode == CalibrationMode::Paper);
  CHECK(m.potential.c == 392.7);
  CHECK(m.potential.beta == 1.3201e7);
}

TEST_CASE("dotted keys, comments and sections are equivalent") {
  const RunConfig a = parse_config_string("# comment\n[domain]\nepsilon = 1.25e-3  # inline\n");
  const RunConfig b = parse_config_string("domain.epsilon = 1.25e-3\n");
  CHECK(a == b);
  CHECK(a.domain.d == 1.25e-3);
  CHECK(a.load.delta == 1.25e-3);
}

TEST_CASE("echo round trip") {
  const std::string text =
      "[material]\nE = 3e9\nGc = 350\n[domain]\na = 0.05\nb = 0.075\nell0 = 0.0125\nd = 1e-3\n"
      "[load]\nf0 = 3.5e6\nt_ramp = 3e-5\n[time]\ndt = 4e-8\nt_end = 1.4e-4\noutput_every = 25\n"
      "[output]\nfield_every = 10\nwrite_vtk = true\n[diagnostics]\nbox_half_x = 0.008\n";
  const RunConfig c = parse_config_string(text);
  const std::string echo = echo_config(c);
  const RunConfig back = parse_config_string(echo);
  CHECK(back == c);
  CHECK(echo_config(back) == echo);
  CHECK(echo.find("delta = auto") != std::string::npos);
  CHECK(echo.find("d = 0.001") != std::string::npos);
  CHECK(back.box_half_widths().x == 0.008);
  CHECK(back.box_half_widths().y == 4 * back.domain.epsilon);

  const RunConfig d = parse_config_string("");
  CHECK(parse_config_string(echo_config(d)) == d);
}

TEST_CASE("config file on disk") {
  const auto dir = test_support::scratch("config");
  std::ofstream(dir / "c.ini") << "[time]\nt_end = 1e-5\n";
  const RunConfig c = parse_config((dir / "c.ini").string());
  CHECK(c.time.t_end == 1e-5);
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
