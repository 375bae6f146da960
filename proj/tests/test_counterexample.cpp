#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "hardylab/counterexample.hpp"
#include "hardylab/errors.hpp"
#include "hardylab/report_io.hpp"

using namespace hardylab;

namespace {

bool has_note(const CounterexampleReport& rep, const std::string& needle) {
  for (const std::string& n : rep.notes) {
    if (n.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("certificate checker accepts exact equality and flags corruption") {
  // Constant damping with the arithmetic mean: lhs == rhs exactly.
  const std::vector<double> a = {2.0, 1.0};
  const std::vector<double> c = {1.0, 1.5};
  const std::vector<double> r = {0.5, 0.5};
  std::vector<double> mob = {1.0, 0.75};
  std::vector<std::uint8_t> flags;
  CertificateStats clean = check_certificates(a, c, r, mob, &flags);
  CHECK(clean.checked == 2);
  CHECK(clean.violations == 0);
  CHECK(clean.first_violation_n == 0);
  CHECK(clean.worst_margin_rel == 0.0);
  CHECK(flags == std::vector<std::uint8_t>{1, 1});

  // A mean value a hair below the target is a violation.
  mob[1] = c[1] * a[1] * r[1] * (1.0 - 1e-9);
  CertificateStats bad = check_certificates(a, c, r, mob, &flags);
  CHECK(bad.violations == 1);
  CHECK(bad.first_violation_n == 2);
  CHECK(bad.worst_margin_rel < -1e-12);
  CHECK(bad.worst_margin_rel == doctest::Approx(-1e-9).epsilon(1e-3));
  CHECK(flags == std::vector<std::uint8_t>{1, 0});

  CHECK_THROWS_AS(
      check_certificates(a, c, r, std::vector<double>{1.0}, nullptr),
      usage_error);
  CHECK_THROWS_AS(check_certificates(std::vector<double>{}, std::vector<double>{},
                                     std::vector<double>{}, std::vector<double>{},
                                     nullptr),
                  usage_error);
}

TEST_CASE("corrupting a genuine run's means is caught") {
  CounterexampleReport rep = counterexample(MeanSpec::arithmetic(), SeqSpec::harmonic(), 2000);
  REQUIRE(rep.verdict != CexVerdict::refused);
  REQUIRE(rep.certificates.violations == 0);

  std::vector<double> tampered = rep.mean_of_b;
  tampered[100] = rep.c[100] * rep.a[100] * rep.strict_r.values[100] * (1.0 - 1e-9);
  tampered[1500] = rep.c[1500] * rep.a[1500] * rep.strict_r.values[1500] * (1.0 - 1e-8);
  std::vector<std::uint8_t> flags;
  CertificateStats bad =
      check_certificates(rep.a, rep.c, rep.strict_r.values, tampered, &flags);
  CHECK(bad.violations == 2);
  CHECK(bad.first_violation_n == 101);
  CHECK(flags[100] == 0);
  CHECK(flags[1500] == 0);
  CHECK(flags[99] == 1);
}

TEST_CASE("non-homogeneous means are refused at the axiom gate") {
  CounterexampleReport rep = counterexample(
      MeanSpec::quasiarithmetic("x + log(x)"), SeqSpec::harmonic(), 1000);
  CHECK(rep.verdict == CexVerdict::refused);
  CHECK(rep.refusal_reason.find("homogeneity") != std::string::npos);
  CHECK(!rep.axioms.find("homogeneity").pass);
}

TEST_CASE("means with the full Hardy property are refused at the premise gate") {
  CounterexampleReport geo =
      counterexample(MeanSpec::geometric(), SeqSpec::harmonic(), 20000);
  CHECK(geo.verdict == CexVerdict::refused);
  CHECK(geo.refusal_reason.find("divergence premise") != std::string::npos);
  CHECK(geo.divergence.holds == TriState::fails);

  CounterexampleReport pw =
      counterexample(MeanSpec::power(0.5), SeqSpec::harmonic(), 20000);
  CHECK(pw.verdict == CexVerdict::refused);

  CounterexampleReport conv =
      counterexample(MeanSpec::arithmetic(), SeqSpec::geometric(0.5), 100);
  CHECK(conv.verdict == CexVerdict::refused);
}

TEST_CASE("truncation-limited run is inconclusive but internally verified") {
  CounterexampleReport rep =
      counterexample(MeanSpec::arithmetic(), SeqSpec::harmonic(), 20000);
  CHECK(rep.verdict == CexVerdict::inconclusive);
  CHECK(!rep.tail_stable);
  CHECK(has_note(rep, "increase N"));

  CHECK(rep.n0 == 1);
  CHECK(rep.bound_on_a == 1.0);
  CHECK(rep.bound_verified);
  CHECK(rep.certificates.checked == 20000);
  CHECK(rep.certificates.violations == 0);
  CHECK(rep.certificates.worst_margin_rel >= -1e-12);
  CHECK(rep.r_strictly_decreasing);
  CHECK(rep.truncated_tail);
  for (const IdentityBlock& blk : rep.identities) {
    CHECK(blk.ar_ok);
    CHECK(blk.acr_ok);
  }
  CHECK(rep.partition.kind == BlockCase::case_two);

  // Certificates mirror into the per-term flags.
  CHECK(rep.certificate_flags.size() == 20000);
  for (std::uint8_t f : rep.certificate_flags) CHECK(f == 1);
}

TEST_CASE("deep run constructs the counterexample") {
  CounterexampleReport rep =
      counterexample(MeanSpec::arithmetic(), SeqSpec::harmonic(), 1000000);
  CHECK(rep.verdict == CexVerdict::constructed);
  CHECK(rep.tail_stable);
  CHECK(rep.tail_max_increment_rel < 1e-6);
  CHECK(rep.certificates.violations == 0);
  CHECK(rep.certificates.checked == 1000000);

  // The damped series total settles while the summed means keep growing well
  // past it: the per-sequence sums are finite but no uniform constant binds
  // them to the series total.
  CHECK(rep.sum_b_total > 0.0);
  CHECK(rep.mean_sum_total > rep.sum_b_total);

  // Identity lower bounds accumulate to sum level/(level+1)^2.
  long double expect = 0.0L;
  for (std::size_t j = 0; j < rep.identities.size(); ++j) {
    const long double level = static_cast<long double>(j);
    expect += level / ((level + 1.0L) * (level + 1.0L));
  }
  CHECK(std::fabs(rep.identity_bound_total - static_cast<double>(expect)) <=
        1e-14 * static_cast<double>(expect));
}

TEST_CASE("max mean runs the pipeline without refusal") {
  CounterexampleReport rep =
      counterexample(MeanSpec::max(), SeqSpec::harmonic(), 100000);
  CHECK(rep.verdict != CexVerdict::refused);
  CHECK(rep.certificates.violations == 0);
  CHECK(rep.n0 == 1);
  // Ratio of the max mean over harmonic terms is exactly n.
  CHECK(rep.c[999] == 1000.0);
}

TEST_CASE("reports are bitwise deterministic") {
  CounterexampleReport one =
      counterexample(MeanSpec::arithmetic(), SeqSpec::harmonic(), 2000, 42);
  CounterexampleReport two =
      counterexample(MeanSpec::arithmetic(), SeqSpec::harmonic(), 2000, 42);
  CHECK(counterexample_json(one).dump() == counterexample_json(two).dump());
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(counterexample(MeanSpec::arithmetic(), SeqSpec::harmonic(), 19),
                  usage_error);
}

TEST_CASE("opaque rules note the numeric infimum decision") {
  // Truncated at N the custom rule's minimum is 1/N, far above the relative
  // threshold, so the numeric dispatch picks the positive-infimum branch.
  CounterexampleReport rep =
      counterexample(MeanSpec::arithmetic(), SeqSpec::custom("1/x"), 20000);
  CHECK(rep.verdict != CexVerdict::refused);
  CHECK(has_note(rep, "infimum class decided numerically"));
  CHECK(rep.partition.kind == BlockCase::case_one);
  CHECK(rep.certificates.violations == 0);
  for (const IdentityBlock& blk : rep.identities) {
    CHECK(blk.ar_ok);
    CHECK(blk.acr_ok);
  }
}
