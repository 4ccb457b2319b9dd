#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "distortia/logarithm.hpp"

using namespace distortia;
using Catch::Approx;

namespace {
double estimate_at(const LogRecovery& rec, double x) {
  for (size_t i = 0; i < rec.grid.size(); ++i)
    if (std::abs(rec.grid[i] - x) < 1e-12) return rec.g_estimates[i];
  FAIL("grid point not found");
  return 0.0;
}
}  // namespace

TEST_CASE("recovering the generator of the power distortion") {
  // x^{1/e} is the time-1 map of the -x ln x flow
  LogRecovery rec = recover_generator(power_distortion(std::exp(-1.0)));
  CHECK(estimate_at(rec, 0.5) == Approx(0.34657359027997265).margin(1e-3));
  CHECK(rec.concavity.pass);
  CHECK(rec.roundtrip_error <= 1e-3);
  CHECK(rec.psi_prime_at_1 == Approx(std::exp(-1.0)).margin(1e-6));
  SECTION("relative error stays small across the core grid") {
    for (size_t i = 0; i < rec.grid.size(); ++i) {
      double x = rec.grid[i];
      if (x < 0.05 || x > 0.95) continue;
      REQUIRE(rec.g_estimates[i] == Approx(-x * std::log(x)).epsilon(1e-3));
    }
  }
  SECTION("exported knots build a generator") {
    Generator g = make_knot_generator(rec.knots);
    CHECK(g(0.5) == Approx(0.34657359027997265).margin(1e-3));
  }
}

TEST_CASE("recovering slope-zero tails") {
  SECTION("complement-power (time-1 of the minimum-draw flow)") {
    LogRecovery rec = recover_generator(power_complement_distortion(std::exp(1.0)));
    for (size_t i = 0; i < rec.grid.size(); ++i) {
      double x = rec.grid[i];
      if (x < 0.05 || x > 0.95) continue;
      REQUIRE(rec.g_estimates[i] ==
              Approx(-(1.0 - x) * std::log1p(-x)).epsilon(1e-3));
    }
    CHECK(rec.roundtrip_error <= 1e-3);
  }
  SECTION("wang shift") {
    LogRecovery rec = recover_generator(wang_distortion(1.0));
    Generator g4 = make_builtin_generator(BuiltinGenerator::wang);
    for (size_t i = 0; i < rec.grid.size(); ++i) {
      double x = rec.grid[i];
      if (x < 0.05 || x > 0.95) continue;
      REQUIRE(rec.g_estimates[i] == Approx(g4(x)).epsilon(1e-3));
    }
    CHECK(rec.roundtrip_error <= 1e-3);
  }
}

TEST_CASE("plateau at 1 violates the positive-left-derivative hypothesis") {
  CHECK_THROWS_AS(recover_generator(clamp_distortion(std::exp(1.0))), ValidationError);
  CHECK_THROWS_AS(recover_generator(clamp_distortion(2.0)), ValidationError);
}

TEST_CASE("kinked distortion is rejected with the jump as evidence") {
  Distortion l2 = piecewise_linear_distortion({{0.0, 0.0}, {0.5, 0.75}, {1.0, 1.0}});
  ExistenceReport rep = existence_check(l2);
  CHECK_FALSE(rep.plausible);
  CHECK_FALSE(rep.recovery.concavity.pass);
  CHECK(rep.recovery.jump_factor == Approx(3.0).margin(0.1));
  CHECK(rep.evidence.find("rejected") != std::string::npos);
  CHECK(rep.recovery.psi_prime_at_1 == Approx(0.5).margin(1e-9));
}

TEST_CASE("identity distortion is the trivial flow") {
  ExistenceReport rep = existence_check(identity_distortion());
  CHECK(rep.plausible);
  CHECK(rep.trivial);
  for (double g : rep.recovery.g_estimates) CHECK(g == 0.0);
}

TEST_CASE("wang time-1 map is plausible") {
  ExistenceReport rep = existence_check(wang_distortion(1.0));
  CHECK(rep.plausible);
  CHECK(rep.recovery.roundtrip_error <= 1e-3);
}

TEST_CASE("recovery is stable") {
  SECTION("doubling the iteration cap changes nothing once converged") {
    LogRecoveryOptions a, b;
    a.max_steps = 10000;
    b.max_steps = 20000;
    LogRecovery ra = recover_generator(power_distortion(std::exp(-1.0)), a);
    LogRecovery rb = recover_generator(power_distortion(std::exp(-1.0)), b);
    for (size_t i = 0; i < ra.grid.size(); ++i)
      REQUIRE(std::abs(ra.g_estimates[i] - rb.g_estimates[i]) <= 1e-12);
  }
  SECTION("two recoveries agree at common grid points") {
    LogRecoveryOptions coarse;
    coarse.grid = {0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
    coarse.compute_roundtrip = false;
    LogRecovery ra = recover_generator(power_complement_distortion(std::exp(1.0)), coarse);
    LogRecovery rb = recover_generator(power_complement_distortion(std::exp(1.0)));
    for (size_t i = 0; i < ra.grid.size(); ++i) {
      double g_full = 0.0;
      for (size_t j = 0; j < rb.grid.size(); ++j)
        if (std::abs(rb.grid[j] - ra.grid[i]) < 1e-12) g_full = rb.g_estimates[j];
      REQUIRE(std::abs(ra.g_estimates[i] - g_full) <= 1e-6);
    }
  }
  SECTION("an explicit derivative rule gives the same estimates") {
    LogRecoveryOptions opts;
    double p = std::exp(-1.0);
    opts.derivative = [p](double x) { return p * std::pow(x, p - 1.0); };
    LogRecovery ra = recover_generator(power_distortion(p), opts);
    LogRecovery rb = recover_generator(power_distortion(p));
    for (size_t i = 0; i < ra.grid.size(); ++i)
      REQUIRE(ra.g_estimates[i] == Approx(rb.g_estimates[i]).epsilon(1e-6));
  }
}
