#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "distortia/normal.hpp"
#include "oracles.hpp"

using namespace distortia;
using Catch::Approx;

TEST_CASE("normal cdf against an integration oracle") {
  for (double z : {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.5}) {
    CHECK(norm_cdf(z) == Approx(oracles::norm_cdf(z)).margin(1e-12));
  }
  CHECK(norm_cdf(0.0) == 0.5);
  CHECK(norm_cdf(1.0) == Approx(0.84134474606854295).epsilon(1e-14));
}

TEST_CASE("quantile is the inverse of the cdf") {
  for (int i = 1; i < 200; ++i) {
    double p = i / 200.0;
    REQUIRE(norm_cdf(norm_quantile(p)) == Approx(p).epsilon(1e-13));
  }
  SECTION("deep tails through the survival pair") {
    for (double q : {1e-10, 1e-50, 1e-150, 1e-300}) {
      double z = norm_isf(q);
      REQUIRE(norm_sf(z) == Approx(q).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(norm_quantile(0.0), ValidationError);
  CHECK_THROWS_AS(norm_quantile(1.0), ValidationError);
}
