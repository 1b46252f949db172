#include <algorithm>

#include "doctest.h"
#include "shockshift/config.hpp"

using namespace shockshift;

namespace {
std::string error_of(const std::string& text, const std::vector<std::string>& sets = {}) {
  try {
    parse_config(text, sets, "test.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_SUITE("config") {

TEST_CASE("documented defaults") {
  const auto c = parse_config("flux:\n  kind: burgers\n");
  CHECK(c.flux.kind == "burgers");
  CHECK(c.u_minus == 1.0);
  CHECK(c.u_plus == -1.0);
  CHECK_FALSE(c.grid.L.has_value());
  CHECK(c.grid.n1 == 401);
  CHECK(c.grid.n_perp == 64);
  CHECK(c.grid.N == 2);
  CHECK(c.shift.M == 10.0);
  CHECK(c.shift.t0 == 1.0);
  CHECK(c.mode == ShiftMode::General);
  CHECK(c.perturbation.amplitude == 0.0);
  CHECK(c.sweep_amplitudes == std::vector<double>{1e-3, 1e-2, 1e-1});
  const auto p = solve_profile(c.flux.build(2), c.u_minus, c.u_plus, 60.0, 0.01);
  CHECK(resolved_L(c, p) == 20.0);
}

TEST_CASE("validation names the field") {
  const auto e = error_of("perturbation:\n  amplitude: -0.1\n");
  CHECK(e.find("perturbation.amplitude") != std::string::npos);
  CHECK(error_of("run:\n  T: 0\n").find("run.T") != std::string::npos);
  CHECK(error_of("grid:\n  n1: 4\n").find("grid.n1") != std::string::npos);
  CHECK(error_of("shift:\n  M: 2\n").find("shift") != std::string::npos);
  CHECK(error_of("u_minus: -1\nu_plus: 1\n").find("u_minus") != std::string::npos);
  CHECK(error_of("mode: sideways\n").find("mode") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with the valid list") {
  const auto e = error_of("viscocity: 0.5\n");
  CHECK(e.find("unknown key 'viscocity'") != std::string::npos);
  CHECK(e.find("test.yaml:1:1") != std::string::npos);
  for (const char* k : {"flux", "grid", "perturbation", "run", "sweep"}) CHECK(e.find(k) != std::string::npos);
  const auto nested = error_of("grid:\n  n1: 101\n  dx: 0.1\n");
  CHECK(nested.find("grid.dx") != std::string::npos);
  CHECK(nested.find("test.yaml:3:") != std::string::npos);
  CHECK(nested.find("n_perp") != std::string::npos);
}

TEST_CASE("parse errors carry a position") {
  const auto e = error_of("grid: [1, 2\n");
  CHECK(e.find("test.yaml:") != std::string::npos);
  CHECK(e.find("parse error") != std::string::npos);
  CHECK(error_of("grid:\n  n1: many\n").find("grid.n1") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/path.yaml"), ConfigError);
}

TEST_CASE("overrides") {
  const auto c = parse_config("grid:\n  n1: 101\n", {"grid.n_perp=16", "perturbation.amplitude=0.02", "mode=special",
                                                     "sweep.amplitudes=[0.5, 0.25]", "run.dt=0.001"});
  CHECK(c.grid.n1 == 101);
  CHECK(c.grid.n_perp == 16);
  CHECK(c.perturbation.amplitude == 0.02);
  CHECK(c.mode == ShiftMode::Special);
  CHECK(c.sweep_amplitudes == std::vector<double>{0.5, 0.25});
  CHECK(c.dt.value() == 0.001);
  CHECK(error_of("", {"grid.bogus=1"}).find("grid.bogus") != std::string::npos);
  CHECK(error_of("", {"novalue"}).find("key=value") != std::string::npos);
  CHECK(error_of("", {"a.b.c=1"}).find("two levels") != std::string::npos);
}

TEST_CASE("dump round-trips") {
  const auto c = parse_config(
      "flux:\n  kind: custom\n  a1: [0, 0, 0.5, 0, 0.25]\n  transverse: [[0, 0.5, 0, 0.2]]\n"
      "grid: {L: 15.5, n1: 129, n_perp: 16}\nmode: general_no_ramp\nshift: {M: 6, t0: 0.5, phi_shape: identity}\n"
      "perturbation: {family: noise, amplitude: 0.03, seed: 77}\nrun: {T: 2.5, dt: 0.0001, diag_stride: 3}\n");
  const auto d = parse_config(dump_config(c));
  CHECK(dump_config(d) == dump_config(c));
  CHECK(d.flux.a1 == c.flux.a1);
  CHECK(d.flux.transverse == c.flux.transverse);
  CHECK(d.grid.L.value() == 15.5);
  CHECK(d.mode == ShiftMode::GeneralNoRamp);
  CHECK(d.shift.phi_shape == RampShape::Identity);
  CHECK(d.perturbation.seed == 77u);
  CHECK(d.dt.value() == 0.0001);
}

TEST_CASE("key listing") {
  const auto& k = config_keys();
  CHECK(std::find(k.begin(), k.end(), "perturbation.amplitude") != k.end());
  CHECK(std::find(k.begin(), k.end(), "u_minus") != k.end());
  CHECK(std::find(k.begin(), k.end(), "viscosity") == k.end());
}

TEST_CASE("flux specs") {
  ExperimentConfig c;
  c.flux.kind = "cubic_convex";
  CHECK(c.flux.build(2).kind() == FluxKind::CubicConvex);
  c.flux.kind = "custom";
  CHECK_THROWS_AS(c.validate(), ConfigError);  // missing a1
  c.flux.a1 = {0.0, 0.0, 0.5};
  CHECK_NOTHROW(c.validate());
  CHECK(c.flux.build(3).n_components() == 3);
}

}
