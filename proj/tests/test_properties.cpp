#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "distortia/properties.hpp"

using namespace distortia;

TEST_CASE("builtin diagnoses match the closed-form analysis") {
  PropertyReport r1 = diagnose(make_builtin_generator(BuiltinGenerator::cvar));
  CHECK(r1.zero_at_zero.holds);
  CHECK_FALSE(r1.strict_concavity.holds);
  CHECK_FALSE(r1.infinite_slope_0.holds);
  CHECK(r1.zero_slope_1.holds);  // finite tail integral: flat at 1
  CHECK_FALSE(r1.iv_note.empty());

  PropertyReport r2 = diagnose(make_builtin_generator(BuiltinGenerator::aimin));
  CHECK(r2.zero_at_zero.holds);
  CHECK(r2.strict_concavity.holds);
  CHECK_FALSE(r2.infinite_slope_0.holds);
  CHECK(r2.zero_slope_1.holds);  // G'_-(1) = -inf
  CHECK_FALSE(r2.iv_note.empty());

  PropertyReport r3 = diagnose(make_builtin_generator(BuiltinGenerator::aimax));
  CHECK(r3.zero_at_zero.holds);
  CHECK(r3.strict_concavity.holds);
  CHECK(r3.infinite_slope_0.holds);
  CHECK_FALSE(r3.zero_slope_1.holds);  // finite left slope -1 at a zero limit
  CHECK(r3.iv_note.empty());

  PropertyReport r4 = diagnose(make_builtin_generator(BuiltinGenerator::wang));
  CHECK(r4.zero_at_zero.holds);
  CHECK(r4.strict_concavity.holds);
  CHECK(r4.infinite_slope_0.holds);
  CHECK(r4.zero_slope_1.holds);
  CHECK(r4.iv_note.empty());
}

TEST_CASE("diagnosis is deterministic and idempotent") {
  Generator g = make_builtin_generator(BuiltinGenerator::aimax);
  PropertyReport a = diagnose(g), b = diagnose(g);
  CHECK(a.zero_at_zero.holds == b.zero_at_zero.holds);
  CHECK(a.strict_concavity.evidence == b.strict_concavity.evidence);
  CHECK(a.infinite_slope_0.holds == b.infinite_slope_0.holds);
  CHECK(a.zero_slope_1.holds == b.zero_slope_1.holds);
}

TEST_CASE("duality swaps the endpoint verdicts") {
  for (auto b : {BuiltinGenerator::cvar, BuiltinGenerator::aimin, BuiltinGenerator::aimax,
                 BuiltinGenerator::wang}) {
    Generator g = make_builtin_generator(b);
    PropertyReport rd = diagnose(dual_generator(g));
    // III of the dual holds exactly when -G'_-(1) of the original is +inf
    CHECK(rd.infinite_slope_0.holds == std::isinf(g.endpoints().s1));
  }
}

TEST_CASE("jump at zero fails property I") {
  // dual of cvar: G(x) = 1-x, with G(0+) = 1 > 0
  PropertyReport r = diagnose(dual_generator(make_builtin_generator(BuiltinGenerator::cvar)));
  CHECK_FALSE(r.zero_at_zero.holds);
}

TEST_CASE("piecewise-linear generators are not strictly concave") {
  Generator tent = make_knot_generator({{0.25, 0.25}, {0.5, 0.5}, {0.75, 0.25}});
  PropertyReport r = diagnose(tent);
  CHECK(r.zero_at_zero.holds);          // slope 1 at a zero limit
  CHECK_FALSE(r.strict_concavity.holds);
  CHECK_FALSE(r.infinite_slope_0.holds);
  CHECK_FALSE(r.zero_slope_1.holds);    // finite slope -1, zero limit
}

TEST_CASE("property table") {
  std::vector<Generator> gens;
  for (auto b : {BuiltinGenerator::cvar, BuiltinGenerator::aimin, BuiltinGenerator::aimax,
                 BuiltinGenerator::wang})
    gens.push_back(make_builtin_generator(b));
  std::string tsv = property_table_tsv(gens);
  CHECK(tsv.find("cvar\t+\t-\t-\t+") != std::string::npos);
  CHECK(tsv.find("aimin\t+\t+\t-\t+") != std::string::npos);
  CHECK(tsv.find("aimax\t+\t+\t+\t-") != std::string::npos);
  CHECK(tsv.find("wang\t+\t+\t+\t+") != std::string::npos);
  CHECK_THROWS_AS(property_table_tsv({}), ValidationError);
  SECTION("single row") {
    std::string one = property_table_tsv({make_builtin_generator(BuiltinGenerator::wang)});
    CHECK(one.find("wang\t+\t+\t+\t+") != std::string::npos);
  }
}
