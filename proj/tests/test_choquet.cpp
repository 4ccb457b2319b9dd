#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "distortia/choquet.hpp"
#include "distortia/distortion.hpp"
#include "oracles.hpp"

using namespace distortia;
using Catch::Approx;

TEST_CASE("from_samples") {
  SECTION("sorts and assigns equal weights") {
    EmpiricalDistribution d = from_samples({3.0, -1.0});
    CHECK(d.values == std::vector<double>{-1.0, 3.0});
    CHECK(d.cum_probs == std::vector<double>{0.5, 1.0});
  }
  SECTION("ties stay adjacent") {
    EmpiricalDistribution d = from_samples({1.0, 1.0, 1.0});
    CHECK(d.size() == 3);
    CHECK(d.mean() == 1.0);
  }
  SECTION("four equal weights") {
    EmpiricalDistribution d = from_samples({2.0, -1.0, 0.0, 1.0});
    CHECK(d.cum_probs == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    CHECK(d.values == std::vector<double>{-1.0, 0.0, 1.0, 2.0});
  }
  SECTION("explicit weights follow their samples through sorting") {
    EmpiricalDistribution d = from_samples({2.0, -1.0}, std::vector<double>{1.0, 3.0});
    CHECK(d.values.front() == -1.0);
    CHECK(d.cum_probs.front() == 0.75);
  }
  CHECK_THROWS_AS(from_samples({}), ValidationError);
  CHECK_THROWS_AS(from_samples({1.0}, std::vector<double>{0.0}), ValidationError);
  CHECK_THROWS_AS(from_samples({1.0}, std::vector<double>{1.0, 2.0}), ValidationError);
}

TEST_CASE("distorted expectation") {
  SECTION("identity reproduces the mean") {
    EmpiricalDistribution d = from_samples({-3.5, 0.25, 1.0, 8.0, -0.125});
    CHECK(std::abs(distorted_expectation(d, identity_distortion()) - d.mean()) <= 1e-12);
  }
  SECTION("tail distortion picks the two worst of four") {
    EmpiricalDistribution d = from_samples({-1.0, 0.0, 1.0, 2.0});
    double got = distorted_expectation(d, clamp_distortion(2.0));
    CHECK(got == oracles::k_worst_mean({-1.0, 0.0, 1.0, 2.0}, 2));
    CHECK(got == -0.5);
  }
  SECTION("minimum of two independent draws") {
    EmpiricalDistribution d = from_samples({-1.0, 3.0});
    double got = distorted_expectation(d, power_complement_distortion(2.0));
    CHECK(got == oracles::pair_min_expectation({-1.0, 3.0}, 2));
    CHECK(got == 0.0);
  }
  SECTION("a jump at zero loads the worst outcome") {
    // Psi with Psi(0+) = 0.5: half the mass lands on the minimum.
    Distortion psi = piecewise_linear_distortion({{0.0, 0.5}, {1.0, 1.0}});
    EmpiricalDistribution d = from_samples({-4.0, 0.0});
    // increments: Psi(0.5)-0 = 0.75, Psi(1)-Psi(0.5) = 0.25
    CHECK(distorted_expectation(d, psi) == Approx(-3.0));
  }
}

TEST_CASE("conjugate phi") {
  Distortion c2 = clamp_distortion(2.0);
  CHECK(conjugate_phi(c2, 0.0) == 1.0);
  CHECK(conjugate_phi(c2, 1.0) == 0.5);
  CHECK(conjugate_phi(c2, 2.0) == 0.0);
  SECTION("piecewise-linear distortions solve at a knot") {
    Distortion pl = piecewise_linear_distortion({{0.0, 0.0}, {0.25, 0.6}, {1.0, 1.0}});
    // max over knots of psi(x) - 1.2 x
    CHECK(conjugate_phi(pl, 1.2) == Approx(0.6 - 1.2 * 0.25).epsilon(1e-14));
  }
  SECTION("smooth distortions via golden section") {
    Distortion w = wang_distortion(1.0);
    CHECK(conjugate_phi(w, 0.0) == 1.0);
    double prev = 1.0;
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      double v = conjugate_phi(w, x);
      REQUIRE(v <= prev + 1e-12);  // nonincreasing
      REQUIRE(v >= 0.0);
      prev = v;
    }
    // golden-section result matches a dense scan
    double x = 0.8;
    double best = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      double y = i / 100000.0;
      best = std::max(best, w(y) - x * y);
    }
    CHECK(conjugate_phi(w, x) == Approx(best).margin(1e-9));
  }
  CHECK_THROWS_AS(conjugate_phi(c2, -0.5), ValidationError);
}

TEST_CASE("extreme measure density") {
  EmpiricalDistribution d = from_samples({-1.0, 0.0, 1.0, 2.0});
  SECTION("identity gives unit density") {
    auto w = extreme_density(d, identity_distortion());
    for (double wi : w) CHECK(wi == 1.0);
  }
  SECTION("tail distortion doubles the worst half") {
    auto w = extreme_density(d, clamp_distortion(2.0));
    CHECK(w == std::vector<double>{2.0, 2.0, 0.0, 0.0});
  }
  SECTION("densities integrate to one and reproduce the Choquet value") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(8);
      for (double& x : v) x = u(rng);
      EmpiricalDistribution dd = from_samples(v);
      Distortion psi = power_complement_distortion(3.0);
      auto w = extreme_density(dd, psi);
      double total = 0.0, mean_w = 0.0, prev = 0.0;
      for (size_t i = 0; i < dd.size(); ++i) {
        double dp = dd.cum_probs[i] - prev;
        total += w[i] * dp;
        mean_w += w[i] * dp * dd.values[i];
        prev = dd.cum_probs[i];
      }
      REQUIRE(total == Approx(1.0).margin(1e-12));
      REQUIRE(mean_w == Approx(distorted_expectation(dd, psi)).margin(1e-12));
    }
  }
  SECTION("reweighting identity is exact for power-of-two weights") {
    auto w = extreme_density(d, clamp_distortion(2.0));
    double s = 0.0, prev = 0.0;
    for (size_t i = 0; i < d.size(); ++i) {
      s += w[i] * (d.cum_probs[i] - prev) * d.values[i];
      prev = d.cum_probs[i];
    }
    CHECK(s == distorted_expectation(d, clamp_distortion(2.0)));
  }
}

TEST_CASE("choquet properties") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> up(0.0, 1.0);

  auto random_concave_pl = [&](int segments) {
    // random concave distortion from decreasing positive slopes
    std::vector<double> slopes(segments);
    double prev = 2.0 + up(rng);
    for (double& s : slopes) {
      s = prev * (0.55 + 0.4 * up(rng));
      prev = s;
    }
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    double x = 0.0, y = 0.0;
    for (int i = 0; i < segments; ++i) {
      x += 1.0 / segments;
      y += slopes[i] / segments;
      pts.push_back({x, y});
    }
    for (auto& [px, py] : pts) py /= y;  // normalize psi(1) = 1
    pts.back() = {1.0, 1.0};
    return piecewise_linear_distortion(pts);
  };

  SECTION("comonotone additivity on sorted data") {
    for (int trial = 0; trial < 200; ++trial) {
      int n = 2 + static_cast<int>(up(rng) * 8);
      std::vector<double> v(n), w(n);
      double acc = -2.0, acc2 = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += up(rng);
        acc2 += up(rng);  // nondecreasing add-on
        v[i] = acc;
        w[i] = acc2;
      }
      std::vector<double> sum(n);
      for (int i = 0; i < n; ++i) sum[i] = v[i] + w[i];
      Distortion psi = random_concave_pl(4);
      EmpiricalDistribution dv = from_samples(v), dw = from_samples(w),
                            ds = from_samples(sum);
      REQUIRE(distorted_expectation(ds, psi) ==
              Approx(distorted_expectation(dv, psi) + distorted_expectation(dw, psi))
                  .margin(1e-12));
    }
  }

  SECTION("monotonicity in the sample values") {
    for (int trial = 0; trial < 200; ++trial) {
      int n = 2 + static_cast<int>(up(rng) * 8);
      std::vector<double> v(n), w(n);
      for (int i = 0; i < n; ++i) {
        v[i] = u(rng);
        w[i] = v[i] + up(rng);
      }
      Distortion psi = random_concave_pl(5);
      REQUIRE(distorted_expectation(from_samples(v), psi) <=
              distorted_expectation(from_samples(w), psi) + 1e-12);
    }
  }

  SECTION("concave distortion never exceeds the mean") {
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 2 + static_cast<int>(up(rng) * 10);
      std::vector<double> v(n);
      for (double& x : v) x = u(rng) * 5.0;
      Distortion psi = random_concave_pl(3 + trial % 5);
      EmpiricalDistribution d = from_samples(v);
      REQUIRE(distorted_expectation(d, psi) <= d.mean() + 1e-12);
    }
  }

  SECTION("tie splitting does not change the value") {
    Distortion psi = random_concave_pl(4);
    EmpiricalDistribution merged = from_samples({-1.0, 2.0}, std::vector<double>{2.0, 2.0});
    EmpiricalDistribution split =
        from_samples({-1.0, -1.0, 2.0, 2.0}, std::vector<double>{1.0, 1.0, 1.0, 1.0});
    CHECK(distorted_expectation(merged, psi) ==
          Approx(distorted_expectation(split, psi)).margin(1e-15));
  }
}
