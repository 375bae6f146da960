#include <cmath>
#include <vector>

#include <doctest.h>

#include "hardylab/errors.hpp"
#include "hardylab/sequence.hpp"
#include "oracles.hpp"

using namespace hardylab;
using Divergence = SeqSpec::Divergence;
using InfClass = SeqSpec::InfClass;

TEST_CASE("term values follow the rule") {
  CHECK(SeqSpec::harmonic().term(5) == 0.2);
  CHECK(SeqSpec::powerlaw(2.0).term(3) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(SeqSpec::powerlaw(0.5).term(4) == 0.5);
  CHECK(SeqSpec::constant(3.5).term(17) == 3.5);
  CHECK(SeqSpec::geometric(0.5).term(3) == 0.125);
  CHECK(SeqSpec::explicit_list({2.0, 4.0, 8.0}).term(2) == 4.0);
  CHECK(SeqSpec::custom("1/x").term(4) == 0.25);
  CHECK(SeqSpec::custom("1/(x + 1)").term(3) == 0.25);
}

TEST_CASE("factories validate their parameters") {
  CHECK_THROWS_AS(SeqSpec::powerlaw(std::nan("")), usage_error);
  CHECK_THROWS_AS(SeqSpec::constant(0.0), usage_error);
  CHECK_THROWS_AS(SeqSpec::constant(-1.0), usage_error);
  CHECK_THROWS_AS(SeqSpec::geometric(0.0), usage_error);
  CHECK_THROWS_AS(SeqSpec::geometric(-0.5), usage_error);
  CHECK_THROWS_AS(SeqSpec::explicit_list({}), usage_error);
  CHECK_THROWS_AS(SeqSpec::explicit_list({1.0, 0.0}), usage_error);
  CHECK_THROWS_AS(SeqSpec::explicit_list({1.0, -2.0}), usage_error);
  CHECK_THROWS_AS(SeqSpec::custom("log("), parse_error);
}

TEST_CASE("nonpositive or non-finite terms fault at evaluation") {
  CHECK_THROWS_AS(SeqSpec::custom("x - 2").term(1), numerical_fault);
  CHECK_THROWS_AS(SeqSpec::custom("x - 2").term(2), numerical_fault);
  CHECK(SeqSpec::custom("x - 2").term(3) == 1.0);
  CHECK_THROWS_AS(SeqSpec::explicit_list({1.0, 2.0}).term(3), usage_error);
}

TEST_CASE("sum divergence is analytic for rule families") {
  CHECK(SeqSpec::harmonic().sum_divergence() == Divergence::divergent);
  CHECK(SeqSpec::powerlaw(1.0).sum_divergence() == Divergence::divergent);
  CHECK(SeqSpec::powerlaw(0.5).sum_divergence() == Divergence::divergent);
  CHECK(SeqSpec::powerlaw(2.0).sum_divergence() == Divergence::convergent);
  CHECK(SeqSpec::constant(1.0).sum_divergence() == Divergence::divergent);
  CHECK(SeqSpec::geometric(0.5).sum_divergence() == Divergence::convergent);
  CHECK(SeqSpec::geometric(1.0).sum_divergence() == Divergence::divergent);
  CHECK(SeqSpec::geometric(2.0).sum_divergence() == Divergence::divergent);
  CHECK(SeqSpec::explicit_list({1.0}).sum_divergence() == Divergence::unknown);
  CHECK(SeqSpec::custom("1/x").sum_divergence() == Divergence::unknown);
}

TEST_CASE("infimum class is analytic for rule families") {
  CHECK(SeqSpec::harmonic().infimum_class() == InfClass::zero);
  CHECK(SeqSpec::powerlaw(0.5).infimum_class() == InfClass::zero);
  CHECK(SeqSpec::powerlaw(0.0).infimum_class() == InfClass::positive);
  CHECK(SeqSpec::powerlaw(-1.0).infimum_class() == InfClass::positive);
  CHECK(SeqSpec::constant(0.25).infimum_class() == InfClass::positive);
  CHECK(SeqSpec::geometric(0.5).infimum_class() == InfClass::zero);
  CHECK(SeqSpec::geometric(1.5).infimum_class() == InfClass::positive);
  CHECK(SeqSpec::explicit_list({1.0}).infimum_class() == InfClass::unknown);
  CHECK(SeqSpec::custom("1/x").infimum_class() == InfClass::unknown);
}

TEST_CASE("materialize produces compensated partial sums") {
  SeriesBuffer buf = materialize(SeqSpec::harmonic(), 3);
  REQUIRE(buf.size() == 3);
  CHECK(buf.terms[0] == 1.0);
  CHECK(buf.terms[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(buf.partial_sums[0] == 1.0);
  CHECK(buf.partial_sums[1] == 1.5);
  CHECK(buf.partial_sums[2] == doctest::Approx(11.0 / 6.0).epsilon(1e-15));

  SeriesBuffer big = materialize(SeqSpec::harmonic(), 100000);
  const long double truth = oracle::harmonic_number(100000);
  CHECK(std::fabs(static_cast<double>(truth) - big.partial_sums.back()) <=
        1e-13 * static_cast<double>(truth));
}

TEST_CASE("materialize respects explicit list length and positivity") {
  CHECK_THROWS_AS(materialize(SeqSpec::explicit_list({1.0, 2.0}), 3), usage_error);
  CHECK(materialize(SeqSpec::explicit_list({1.0, 2.0}), 2).size() == 2);
  CHECK_THROWS_AS(materialize(SeqSpec::custom("2 - x"), 5), numerical_fault);
  CHECK_THROWS_AS(materialize(SeqSpec::geometric(1e-30), 20), numerical_fault);
}

TEST_CASE("describe names the rule") {
  CHECK(SeqSpec::harmonic().describe().find("harmonic") != std::string::npos);
  CHECK(SeqSpec::powerlaw(2.0).describe().find("powerlaw") != std::string::npos);
  CHECK(SeqSpec::custom("1/x").describe().find("1/x") != std::string::npos);
}
