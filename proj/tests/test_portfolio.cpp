#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "distortia/portfolio.hpp"

using namespace distortia;
using Catch::Approx;

namespace {
const Semigroup& aimin_semigroup() {
  static Semigroup s = build_semigroup(make_builtin_generator(BuiltinGenerator::aimin));
  return s;
}

ScenarioMatrix product_grid(const std::vector<double>& marginal) {
  std::vector<std::vector<double>> gains;
  for (double a : marginal)
    for (double b : marginal) gains.push_back({a, b});
  return make_scenario_matrix(std::move(gains));
}
}  // namespace

TEST_CASE("single asset reduces to a sign choice") {
  ScenarioMatrix m = make_scenario_matrix({{-1.0}, {3.0}});
  PortfolioSolution sol = optimize(aimin_semigroup(), m);
  CHECK(sol.direction == std::vector<double>{1.0});
  CHECK(sol.alpha_star > 0.0);
  CHECK(sol.status == AlphaStatus::interior);
}

TEST_CASE("symmetric two-asset instance finds the diagonal") {
  ScenarioMatrix m = product_grid({-1.0, 0.0, 1.0, 3.0});
  PortfolioOptions opts;
  opts.starts = 16;
  PortfolioSolution sol = optimize(aimin_semigroup(), m, opts);
  const double inv_sqrt2 = 0.70710678118654752;
  REQUIRE(sol.status == AlphaStatus::interior);
  for (const auto& st : sol.starts) {
    double dot = st.direction[0] * inv_sqrt2 + st.direction[1] * inv_sqrt2;
    double ang = std::acos(std::clamp(dot, -1.0, 1.0));
    REQUIRE(ang <= 1e-2);
  }
  CHECK(sol.uniqueness_flag);
  SECTION("the objective is scale invariant along the found ray") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    EmpiricalDistribution base = [&] {
      std::vector<double> x;
      for (const auto& row : m.gains)
        x.push_back(row[0] * sol.direction[0] + row[1] * sol.direction[1]);
      return from_samples(x, m.probs);
    }();
    AlphaResult r0 = alpha(aimin_semigroup(), base, 1e-7);
    for (int i = 0; i < 5; ++i) {
      double lam = u(rng);
      std::vector<double> x;
      for (const auto& row : m.gains)
        x.push_back(lam * (row[0] * sol.direction[0] + row[1] * sol.direction[1]));
      AlphaResult r = alpha(aimin_semigroup(), from_samples(x, m.probs), 1e-7);
      REQUIRE(r.value == r0.value);
    }
  }
}

TEST_CASE("zero-mean scenarios score zero everywhere") {
  ScenarioMatrix m = make_scenario_matrix({{-1.0, -1.0}, {1.0, 1.0}, {-2.0, 2.0}, {2.0, -2.0}});
  PortfolioSolution sol = optimize(aimin_semigroup(), m);
  CHECK(sol.alpha_star == 0.0);
  CHECK(sol.status == AlphaStatus::zero);
}

TEST_CASE("arbitrage directions are detected and reported") {
  // asset 1 gains in every scenario
  ScenarioMatrix m = make_scenario_matrix({{1.0, -1.0}, {2.0, 1.0}, {0.5, 0.0}});
  PortfolioSolution sol = optimize(aimin_semigroup(), m);
  CHECK(sol.arbitrage);
  CHECK(std::isinf(sol.alpha_star));
  CHECK(sol.status == AlphaStatus::infinite);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(make_scenario_matrix({{1.0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(make_scenario_matrix({{1.0}, {1.0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(make_scenario_matrix({{1.0}, {2.0}}, {0.5, -0.5}), ValidationError);
  ScenarioMatrix m = make_scenario_matrix({{-1.0}, {3.0}});
  PortfolioOptions opts;
  opts.starts = 0;
  CHECK_THROWS_AS(optimize(aimin_semigroup(), m, opts), ValidationError);
}

TEST_CASE("multistart rays coincide on random discretized instances") {
  // strict quasi-concavity regime: aimin flow, positive-mean scenario grids
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.5);
  int agree = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> ma(3), mb(3);
    for (int i = 0; i < 3; ++i) {
      ma[i] = u(rng);
      mb[i] = u(rng);
    }
    // force some loss and an overall positive drift in each asset
    ma[0] = -std::abs(ma[0]) - 0.1;
    mb[0] = -std::abs(mb[0]) - 0.1;
    ma[2] = std::abs(ma[2]) + 1.0;
    mb[2] = std::abs(mb[2]) + 1.0;
    std::vector<std::vector<double>> gains;
    for (double a : ma)
      for (double b : mb) gains.push_back({a, b});
    ScenarioMatrix m = make_scenario_matrix(std::move(gains));
    PortfolioOptions opts;
    opts.starts = 8;
    opts.seed = 1000 + trial;
    opts.index_tol = 1e-6;
    PortfolioSolution sol = optimize(aimin_semigroup(), m, opts);
    if (sol.arbitrage) {
      ++agree;  // a detected arbitrage ray is a consistent outcome
      continue;
    }
    if (sol.uniqueness_flag) {
      ++agree;
    } else {
      WARN("multistart disagreement at trial " << trial << ", alpha* = " << sol.alpha_star);
    }
  }
  CHECK(agree >= 95);
}
