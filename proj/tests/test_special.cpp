#include <catch_amalgamated.hpp>

#include <cmath>

#include "primespan/special.hpp"

using namespace primespan;

TEST_CASE("closed forms on the initial intervals") {
  const auto& T = default_table();
  REQUIRE(T.rho(0.0) == 1.0);
  REQUIRE(T.rho(0.5) == 1.0);
  REQUIRE(T.rho(1.0) == 1.0);
  REQUIRE(T.rho(1.5) == Catch::Approx(1.0 - std::log(1.5)).margin(1e-14));
  REQUIRE(T.rho(2.0) == Catch::Approx(0.306852819440055).margin(1e-13));

  REQUIRE(T.omega(1.0) == 1.0);
  REQUIRE(T.omega(1.5) == Catch::Approx(2.0 / 3.0).margin(1e-14));
  REQUIRE(T.omega(2.0) == Catch::Approx(0.5).margin(1e-14));
  REQUIRE(T.omega(2.5) == Catch::Approx((1.0 + std::log(1.5)) / 2.5).margin(1e-14));
  REQUIRE(T.omega(3.0) == Catch::Approx((1.0 + std::log(2.0)) / 3.0).margin(1e-14));

  double eg = std::exp(kEulerGamma);
  REQUIRE(T.F(0.5) == Catch::Approx(4.0 * eg).margin(1e-12));
  REQUIRE(T.F(3.0) == Catch::Approx(2.0 * eg / 3.0).margin(1e-12));
  REQUIRE(T.f(0.5) == 0.0);
  REQUIRE(T.f(2.0) == 0.0);
  REQUIRE(T.f(3.0) == Catch::Approx(2.0 * eg * std::log(2.0) / 3.0).margin(1e-10));
  REQUIRE(T.f(3.0) == Catch::Approx(0.823030216602).margin(1e-10));
}

TEST_CASE("interior reference values") {
  const auto& T = default_table();
  REQUIRE(T.rho(3.0) == Catch::Approx(0.0486083883).margin(1e-9));
  REQUIRE(T.rho(10.0) == Catch::Approx(2.769197e-11).epsilon(1e-4));
  REQUIRE(std::fabs(T.omega(20.0) - std::exp(-kEulerGamma)) < 1e-12);
  REQUIRE(T.F(6.0) == Catch::Approx(1.00010566).margin(2e-7));
  REQUIRE(T.f(6.0) == Catch::Approx(0.99989506).margin(2e-7));
  REQUIRE(std::fabs(T.F(20.0) - 1.0) < 1e-12);
  REQUIRE(std::fabs(T.f(20.0) - 1.0) < 1e-12);
}

TEST_CASE("shape invariants") {
  const auto& T = default_table();
  double prev = 1.0;
  for (double u = 1.5; u <= 25.0; u += 0.5) {
    double r = T.rho(u);
    REQUIRE(r >= 0.0);
    if (prev > 1e-30) REQUIRE(r < prev);
    prev = r;
  }
  for (double u = 2.1; u <= 20.0; u += 0.7) {
    REQUIRE(T.f(u) <= 1.0 + 1e-12);
    REQUIRE(T.F(u) >= 1.0 - 1e-12);
    REQUIRE(T.f(u) <= T.F(u) + 1e-12);
  }
  // omega converges to e^-gamma with shrinking oscillation
  double eg = std::exp(-kEulerGamma);
  REQUIRE(std::fabs(T.omega(5.0) - eg) > std::fabs(T.omega(8.0) - eg));
  REQUIRE(std::fabs(T.omega(8.0) - eg) > std::fabs(T.omega(14.0) - eg));
}

TEST_CASE("delay relations hold under numerical differentiation") {
  const auto& T = default_table();
  const double d = 1e-3;
  for (double u : {2.5, 3.25, 4.5, 7.0}) {
    double drho = (T.rho(u + d) - T.rho(u - d)) / (2.0 * d);
    REQUIRE(drho == Catch::Approx(-T.rho(u - 1.0) / u).margin(1e-4));
  }
  for (double u : {2.5, 3.5, 6.0}) {
    double g1 = (u + d) * T.omega(u + d), g0 = (u - d) * T.omega(u - d);
    REQUIRE((g1 - g0) / (2.0 * d) == Catch::Approx(T.omega(u - 1.0)).margin(1e-4));
  }
  for (double u : {3.5, 5.0}) {
    double g1 = (u + d) * T.F(u + d), g0 = (u - d) * T.F(u - d);
    REQUIRE((g1 - g0) / (2.0 * d) == Catch::Approx(T.f(u - 1.0)).margin(1e-4));
    double h1 = (u + d) * T.f(u + d), h0 = (u - d) * T.f(u - d);
    REQUIRE((h1 - h0) / (2.0 * d) == Catch::Approx(T.F(u - 1.0)).margin(1e-4));
  }
}

TEST_CASE("table construction and domains") {
  REQUIRE_THROWS_AS(SpecialFnTable(3.0), std::domain_error);
  REQUIRE_THROWS_AS(SpecialFnTable(50.0, 0.1), std::domain_error);
  REQUIRE_THROWS_AS(SpecialFnTable(50.0, 0.0), std::domain_error);

  const auto& T = default_table();
  REQUIRE_THROWS_AS(T.rho(-0.1), std::domain_error);
  REQUIRE_THROWS_AS(T.rho(T.u_max() + 1.0), std::domain_error);
  REQUIRE_THROWS_AS(T.omega(0.5), std::domain_error);
  REQUIRE_THROWS_AS(T.f(0.0), std::domain_error);
  REQUIRE_THROWS_AS(T.F(-1.0), std::domain_error);

  // same step, shorter deck: identical values on the shared range
  SpecialFnTable S(10.0, 1e-3);
  REQUIRE(S.rho(3.0) == T.rho(3.0));
  REQUIRE(S.omega(7.5) == T.omega(7.5));
  // coarser step still lands within quadrature accuracy
  SpecialFnTable C(20.0, 5e-3);
  REQUIRE(C.rho(3.0) == Catch::Approx(T.rho(3.0)).margin(1e-7));
  REQUIRE(C.F(6.0) == Catch::Approx(T.F(6.0)).margin(1e-7));
}

TEST_CASE("upper sieve constant estimate") {
  auto est = c_plus_estimate();
  REQUIRE(est.value == Catch::Approx(1.010123).margin(2e-5));
  REQUIRE(est.maximizer == Catch::Approx(2.763223).margin(5e-3));
  REQUIRE(est.value > 1.01);
  REQUIRE(est.value < 1.02);
  REQUIRE(est.maximizer > 2.5);
  REQUIRE(est.maximizer < 3.0);
  REQUIRE(est.value ==
          Catch::Approx(std::exp(kEulerGamma) * buchstab_omega(est.maximizer))
              .margin(1e-12));
  REQUIRE(c_plus_default() == est.value);
  REQUIRE(c_minus_default() == Catch::Approx(std::exp(kEulerGamma) / 2.0).margin(0));
}

TEST_CASE("dilation minimum and threshold") {
  auto p = maier_stewart(1.5);
  REQUIRE(p.v == Catch::Approx(1.759154).margin(2e-4));
  REQUIRE(p.r_min == Catch::Approx(0.890268741).margin(1e-7));
  REQUIRE(std::fabs(p.residual) < 1e-8);
  REQUIRE_FALSE(p.at_boundary);

  double target = std::exp(kEulerGamma) / 2.0;
  REQUIRE(maier_stewart(1.3).r_min < target);
  REQUIRE(maier_stewart(1.7).r_min > target);
  double cross = maier_stewart_crossover();
  REQUIRE(cross == Catch::Approx(1.500462).margin(2e-3));
  REQUIRE(cross == Catch::Approx(1.50).margin(0.01));

  REQUIRE_THROWS_AS(maier_stewart(1.0), std::domain_error);
  REQUIRE_THROWS_AS(maier_stewart(2.0), std::domain_error);
}
