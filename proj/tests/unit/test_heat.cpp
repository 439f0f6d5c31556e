#include <doctest.h>

#include <random>

#include "roesser2d/heat.hpp"
#include "roesser2d/model.hpp"
#include "support/test_helpers.hpp"

using namespace roesser2d;

TEST_CASE("default discretization gives the exact rational coefficients") {
  const Roesser2D model = build_heat_model(HeatParams{0.1, 0.1});
  CHECK(model.A(0, 0) == doctest::Approx(0.1 / 0.21).epsilon(1e-15));
  CHECK(model.A(1, 0) == doctest::Approx(-0.1 / 0.21).epsilon(1e-15));
  CHECK(model.A(0, 1) == 0.0);
  CHECK(model.A(1, 1) == 1.0);
  CHECK(model.B(0, 0) == doctest::Approx(0.01 / 0.21).epsilon(1e-15));
  CHECK(model.B(1, 0) == doctest::Approx(-0.01 / 0.21).epsilon(1e-15));
  CHECK(model.E(0, 0) == 1.0);
  CHECK(model.E(1, 1) == 0.0);
  CHECK(model.F(0, 0) == 0.1);
  CHECK(model.F(0, 1) == 0.1);
}

TEST_CASE("three-decimal truncation reproduces the printed matrices") {
  const Roesser2D model = build_heat_model(
      HeatParams{0.1, 0.1}, CoefficientRounding::ThreeDecimalTruncation);
  CHECK(model.A(0, 0) == 0.476);
  CHECK(model.A(1, 0) == -0.476);
  CHECK(model.B(0, 0) == 0.047);
  CHECK(model.B(1, 0) == -0.047);
}

TEST_CASE("unit steps give a = b = 1/3") {
  const Roesser2D model = build_heat_model(HeatParams{1.0, 1.0});
  CHECK(model.A(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(model.B(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("equal steps simplify to a = 1/(2 + dx)") {
  for (const double step : {0.05, 0.3, 1.7}) {
    const Roesser2D model = build_heat_model(HeatParams{step, step});
    CHECK(model.A(0, 0) == doctest::Approx(1.0 / (2.0 + step)).epsilon(1e-14));
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(build_heat_model(HeatParams{0.0, 0.1}), InvalidParams);
  CHECK_THROWS_AS(build_heat_model(HeatParams{0.1, -1.0}), InvalidParams);
  CHECK_THROWS_AS(
      build_heat_model(HeatParams{std::numeric_limits<double>::quiet_NaN(),
                                  0.1}),
      InvalidParams);
}

TEST_CASE("coefficient identities hold across the parameter range") {
  std::mt19937 rng(7701);
  std::uniform_real_distribution<double> step(1e-3, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double dx = step(rng);
    const double dt = step(rng);
    const Roesser2D model = build_heat_model(HeatParams{dx, dt});
    const double a = model.A(0, 0);
    const double b = model.B(0, 0);
    const double denom = dx + dt + dx * dt;
    CHECK(std::abs(a * denom - dt) <= 1e-15 * (1.0 + dt));
    CHECK(std::abs(b - a * dx) <= 1e-15 * (1.0 + std::abs(b)));
    CHECK(a > 0.0);
    CHECK(a < 1.0);

    const ValidationReport report = validate(model);
    CHECK(report.valid);
    CHECK(report.rank_E == 1);
  }
}
