#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "distortia/acceptability.hpp"

using namespace distortia;
using Catch::Approx;

namespace {
const Semigroup& cvar_semigroup() {
  static Semigroup s = build_semigroup(make_builtin_generator(BuiltinGenerator::cvar));
  return s;
}
}  // namespace

TEST_CASE("alpha boundary statuses") {
  const Semigroup& s = cvar_semigroup();
  SECTION("all nonnegative samples are infinitely acceptable") {
    AlphaResult r = alpha(s, from_samples({0.0, 1.0, 2.0}));
    CHECK(r.status == AlphaStatus::infinite);
    CHECK(std::isinf(r.value));
  }
  SECTION("negative mean scores zero") {
    AlphaResult r = alpha(s, from_samples({-2.0, 1.0}));
    CHECK(r.status == AlphaStatus::zero);
    CHECK(r.value == 0.0);
  }
  SECTION("exact zero mean with a loss scores zero") {
    AlphaResult r = alpha(s, from_samples({-1.0, 1.0}));
    CHECK(r.status == AlphaStatus::zero);
    CHECK(r.value == 0.0);
  }
  SECTION("cap reached reports a lower bound") {
    AlphaResult r = alpha(s, from_samples({-1.0, 3.0}), 1e-9, 0.1);
    CHECK(r.status == AlphaStatus::at_cap);
    CHECK(r.value == 0.1);
  }
}

TEST_CASE("alpha interior root") {
  const Semigroup& s = cvar_semigroup();
  EmpiricalDistribution d = from_samples({-1.0, 3.0});
  AlphaResult r = alpha(s, d, 1e-9);
  CHECK(r.status == AlphaStatus::interior);
  CHECK(r.value == Approx(0.40546510810816438).margin(1e-9));
  SECTION("bracket sandwiches the root") {
    CHECK(r.bracket_hi - r.bracket_lo <= 1e-9);
    double flo = distorted_expectation(d, s.distortion_at(r.bracket_lo));
    double fhi = distorted_expectation(d, s.distortion_at(r.bracket_hi));
    CHECK(flo >= 0.0);
    CHECK(fhi < 0.0);
  }
  CHECK(r.evaluations > 0);
}

TEST_CASE("alpha validates its controls") {
  const Semigroup& s = cvar_semigroup();
  EmpiricalDistribution d = from_samples({-1.0, 3.0});
  CHECK_THROWS_AS(alpha(s, d, 1e-11), ValidationError);
  CHECK_THROWS_AS(alpha(s, d, 0.5), ValidationError);
  CHECK_THROWS_AS(alpha(s, d, 1e-9, -1.0), ValidationError);
}

TEST_CASE("alpha scale invariance is exact") {
  const Semigroup& s = cvar_semigroup();
  AlphaResult base = alpha(s, from_samples({-1.0, 3.0}));
  for (double lam : {1e-6, 1.0, 1e6}) {
    AlphaResult r = alpha(s, from_samples({-1.0 * lam, 3.0 * lam}));
    CHECK(r.value == base.value);
    CHECK(r.evaluations == base.evaluations);
  }
}

TEST_CASE("alpha monotonicity in the sample") {
  const Semigroup& s = cvar_semigroup();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> up(0.0, 0.5);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + static_cast<int>(up(rng) * 12);
    std::vector<double> v(n), w(n);
    for (int i = 0; i < n; ++i) {
      v[i] = u(rng);
      w[i] = v[i] + up(rng);
    }
    double av = alpha(s, from_samples(v), 1e-8).value;
    double aw = alpha(s, from_samples(w), 1e-8).value;
    REQUIRE(av <= aw + 2e-8);
  }
}

TEST_CASE("index scaling law under generator scaling") {
  Generator gc = make_builtin_generator(BuiltinGenerator::cvar);
  EmpiricalDistribution d = from_samples({-1.0, 3.0});
  double base = alpha(cvar_semigroup(), d, 1e-9).value;
  for (double lam : {0.5, 2.0, 5.0}) {
    Semigroup sl = build_semigroup(scale_generator(lam, gc));
    double scaled = alpha(sl, d, 1e-9).value;
    CHECK(scaled == Approx(base / lam).margin(2e-9));
  }
}

TEST_CASE("index domination through the generator order") {
  Generator gc = make_builtin_generator(BuiltinGenerator::cvar);
  Generator ga = make_builtin_generator(BuiltinGenerator::aimax);
  Semigroup s1 = build_semigroup(gc);
  Semigroup s2 = build_semigroup(ga);
  Semigroup smin = build_semigroup(min_generators(gc, ga));
  Semigroup smax = build_semigroup(concave_majorant_max(gc, ga));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> v(6);
    for (double& x : v) x = u(rng);
    if (v[0] >= 0 || from_samples(v).mean() <= 0) continue;
    EmpiricalDistribution d = from_samples(v);
    double a1 = alpha(s1, d, 1e-8).value;
    double a2 = alpha(s2, d, 1e-8).value;
    double amin = alpha(smin, d, 1e-8).value;
    double amax = alpha(smax, d, 1e-8).value;
    // smaller distortions mean a larger index: the min-generator flow is
    // below both inputs, so its index dominates both, and vice versa.
    REQUIRE(amin >= std::max(a1, a2) - 2e-8);
    REQUIRE(amax <= std::min(a1, a2) + 2e-8);
  }
}

TEST_CASE("classical measures") {
  EmpiricalDistribution d2 = from_samples({-1.0, 3.0});
  SECTION("sharpe") {
    CHECK(sharpe(d2) == Approx(0.5).epsilon(1e-14));
    CHECK(sharpe(from_samples({-1.0, 1.0})) == 0.0);
    CHECK_THROWS_AS(sharpe(from_samples({2.0, 2.0})), NumericError);
  }
  SECTION("raroc") {
    CHECK(raroc(d2, 0.25) == Approx(1.0).epsilon(1e-14));
    CHECK(std::isinf(raroc(from_samples({1.0, 2.0}), 0.25)));
    CHECK(raroc(from_samples({-4.0, 2.0}), 0.25) == Approx(-0.25));  // mean -1, V@R 4
    CHECK_THROWS_AS(raroc(d2, 0.0), ValidationError);
    CHECK_THROWS_AS(raroc(d2, 1.0), ValidationError);
  }
  SECTION("glr") {
    CHECK(glr(d2) == Approx(2.0).epsilon(1e-14));
    CHECK(std::isinf(glr(from_samples({1.0, 2.0}))));
    CHECK(glr(from_samples({-1.0, 1.0})) == 0.0);
  }
  SECTION("craroc") {
    CHECK(std::isinf(craroc(from_samples({1.0, 3.0}), identity_distortion())));
    CHECK(craroc(from_samples({-1.0, 0.0, 1.0, 2.0}), clamp_distortion(2.0)) ==
          Approx(1.0).epsilon(1e-14));
    CHECK(craroc(from_samples({-2.0, 1.0}), clamp_distortion(2.0)) < 0.0);
  }
}
