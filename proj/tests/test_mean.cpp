#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "hardylab/errors.hpp"
#include "hardylab/mean.hpp"
#include "oracles.hpp"

using namespace hardylab;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(0.1, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("closed-form values") {
  CHECK(eval_mean(MeanSpec::power(0.5), std::vector<double>{1.0, 4.0}) ==
        doctest::Approx(2.25).epsilon(1e-14));
  CHECK(eval_mean(MeanSpec::arithmetic(), std::vector<double>{1.0, 2.0, 3.0}) == 2.0);
  CHECK(eval_mean(MeanSpec::geometric(), std::vector<double>{2.0, 8.0}) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(eval_mean(MeanSpec::harmonic(), std::vector<double>{1.0, 1.0 / 3.0}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_mean(MeanSpec::min(), std::vector<double>{3.0, 1.0, 2.0}) == 1.0);
  CHECK(eval_mean(MeanSpec::max(), std::vector<double>{3.0, 1.0, 2.0}) == 3.0);
}

TEST_CASE("arithmetic prefix means of the harmonic terms") {
  std::vector<double> terms = {1.0, 0.5, 1.0 / 3.0};
  std::vector<double> m = prefix_means(MeanSpec::arithmetic(), terms);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == 1.0);
  CHECK(m[1] == 0.75);
  CHECK(m[2] == doctest::Approx(11.0 / 18.0).epsilon(1e-15));
}

TEST_CASE("power mean matches the long-double oracle") {
  std::mt19937_64 rng(11);
  for (double p : {0.5, 2.0, -2.0, 0.25, -0.5}) {
    CAPTURE(p);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> v = random_vector(rng, 1 + rep % 8);
      const double got = eval_mean(MeanSpec::power(p), v);
      const double want = static_cast<double>(oracle::ref_power(p, v));
      CHECK(std::fabs(got - want) <= 1e-12 * std::fabs(want));
    }
  }
}

TEST_CASE("power mean degenerates to the named families") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v = random_vector(rng, 1 + rep % 8);
    const double a = eval_mean(MeanSpec::power(1.0), v);
    const double g = eval_mean(MeanSpec::power(0.0), v);
    const double h = eval_mean(MeanSpec::power(-1.0), v);
    CHECK(std::fabs(a - eval_mean(MeanSpec::arithmetic(), v)) <= 1e-12 * a);
    CHECK(std::fabs(g - eval_mean(MeanSpec::geometric(), v)) <= 1e-12 * g);
    CHECK(std::fabs(h - eval_mean(MeanSpec::harmonic(), v)) <= 1e-12 * h);
  }
}

TEST_CASE("quasiarithmetic generators reproduce their closed-form families") {
  std::mt19937_64 rng(13);
  MeanSpec qlog = MeanSpec::quasiarithmetic("log(x)");
  MeanSpec qid = MeanSpec::quasiarithmetic("x");
  MeanSpec qhalf = MeanSpec::quasiarithmetic("x^0.5");
  MeanSpec qinv = MeanSpec::quasiarithmetic("x^(-1)");
  MeanSpec qaff = MeanSpec::quasiarithmetic("2*x + 1");  // affine: same mean as arithmetic
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> v = random_vector(rng, 1 + rep % 8);
    const double g = eval_mean(MeanSpec::geometric(), v);
    const double a = eval_mean(MeanSpec::arithmetic(), v);
    const double h = eval_mean(MeanSpec::harmonic(), v);
    const double p = eval_mean(MeanSpec::power(0.5), v);
    CHECK(std::fabs(eval_mean(qlog, v) - g) <= 1e-10 * g);
    CHECK(std::fabs(eval_mean(qid, v) - a) <= 1e-10 * a);
    CHECK(std::fabs(eval_mean(qhalf, v) - p) <= 1e-10 * p);
    CHECK(std::fabs(eval_mean(qinv, v) - h) <= 1e-10 * h);
    CHECK(std::fabs(eval_mean(qaff, v) - a) <= 1e-9 * a);
  }
}

TEST_CASE("quasiarithmetic factory rejects non-monotone generators") {
  CHECK_THROWS_AS(MeanSpec::quasiarithmetic("x^2 - x"), usage_error);
  CHECK_THROWS_AS(MeanSpec::quasiarithmetic("2"), usage_error);
  CHECK_THROWS_AS(MeanSpec::quasiarithmetic("log("), parse_error);
}

TEST_CASE("streaming long prefixes stays close to the oracle") {
  const std::size_t N = 10000;
  std::vector<double> terms(N);
  for (std::size_t i = 0; i < N; ++i) terms[i] = 1.0 / static_cast<double>(i + 1);

  for (const MeanSpec& spec :
       {MeanSpec::arithmetic(), MeanSpec::geometric(), MeanSpec::harmonic(),
        MeanSpec::power(0.5), MeanSpec::power(-2.0)}) {
    CAPTURE(spec.describe());
    MeanAccumulator acc(spec);
    for (double t : terms) acc.push(t);
    const double got = acc.value();
    double want = 0.0;
    switch (spec.family) {
      case MeanFamily::arithmetic:
        want = static_cast<double>(oracle::ref_arithmetic(terms));
        break;
      case MeanFamily::geometric:
        want = static_cast<double>(oracle::ref_geometric(terms));
        break;
      case MeanFamily::harmonic:
        want = static_cast<double>(oracle::ref_harmonic(terms));
        break;
      case MeanFamily::power:
        want = static_cast<double>(oracle::ref_power(spec.p, terms));
        break;
      default:
        break;
    }
    CHECK(std::fabs(got - want) <= 1e-11 * std::fabs(want));
  }
}

TEST_CASE("value is idempotent mid-stream") {
  MeanAccumulator acc(MeanSpec::power(0.5));
  MeanAccumulator fresh(MeanSpec::power(0.5));
  const std::vector<double> data = {4.0, 1.0, 9.0, 0.25, 2.0};
  for (std::size_t i = 0; i < data.size(); ++i) {
    acc.push(data[i]);
    (void)acc.value();
    (void)acc.value();
    fresh.push(data[i]);
  }
  CHECK(acc.value() == fresh.value());
}

TEST_CASE("mean-value bounds hold exactly") {
  std::mt19937_64 rng(14);
  for (const MeanSpec& spec :
       {MeanSpec::arithmetic(), MeanSpec::geometric(), MeanSpec::power(7.0),
        MeanSpec::power(-7.0), MeanSpec::quasiarithmetic("exp(x)")}) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> v = random_vector(rng, 1 + rep % 6);
      const double m = eval_mean(spec, v);
      double lo = v[0], hi = v[0];
      for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      CHECK(m >= lo);
      CHECK(m <= hi);
    }
  }
}

TEST_CASE("input validation") {
  MeanAccumulator acc(MeanSpec::arithmetic());
  CHECK_THROWS_AS(acc.push(0.0), usage_error);
  CHECK_THROWS_AS(acc.push(-1.0), usage_error);
  CHECK_THROWS_AS(acc.push(std::nan("")), usage_error);
  CHECK_THROWS_AS(acc.value(), usage_error);
  CHECK_THROWS_AS(eval_mean(MeanSpec::arithmetic(), std::vector<double>{}),
                  usage_error);
  CHECK_THROWS_AS(MeanSpec::power(std::nan("")), usage_error);
}

TEST_CASE("min prefix means of a decreasing sequence equal the terms") {
  std::vector<double> terms(1000);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = 1.0 / static_cast<double>(i + 1);
  }
  std::vector<double> m = prefix_means(MeanSpec::min(), terms);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    CHECK(m[i] == terms[i]);
  }
}
