#include "hardylab/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hardylab/errors.hpp"
#include "hardylab/kahan.hpp"

namespace hardylab {

namespace {

constexpr double kCertSlack = 1e-12;
constexpr double kIdentitySlack = 1e-12;
constexpr double kTailIncrementRel = 1e-6;
constexpr double kInfThresholdRel = 1e-9;

std::string witness_text(const AxiomResult& r) {
  std::ostringstream os;
  os << r.name << " violated (worst " << r.worst_violation << ")";
  return os.str();
}

}  // namespace

std::string to_string(CexVerdict v) {
  switch (v) {
    case CexVerdict::constructed: return "constructed";
    case CexVerdict::refused: return "refused";
    case CexVerdict::inconclusive: return "inconclusive";
  }
  return "refused";
}

CertificateStats check_certificates(std::span<const double> a,
                                    std::span<const double> c,
                                    std::span<const double> r,
                                    std::span<const double> mean_of_b,
                                    std::vector<std::uint8_t>* flags) {
  const std::size_t N = a.size();
  if (c.size() != N || r.size() != N || mean_of_b.size() != N || N == 0) {
    throw usage_error("certificate check requires four equal-length arrays");
  }
  if (flags != nullptr) flags->assign(N, 1);

  CertificateStats s;
  s.checked = N;
  s.worst_margin_rel = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    const double lhs = mean_of_b[i];
    const double rhs = c[i] * a[i] * r[i];
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    const double margin = (lhs - rhs) / scale;
    if (margin < s.worst_margin_rel) {
      s.worst_margin_rel = margin;
      s.lhs_at_worst = lhs;
      s.rhs_at_worst = rhs;
    }
    if (margin < -kCertSlack) {
      ++s.violations;
      if (s.first_violation_n == 0) s.first_violation_n = i + 1;
      if (flags != nullptr) (*flags)[i] = 0;
    }
  }
  return s;
}

CounterexampleReport counterexample(const MeanSpec& mean, const SeqSpec& seq,
                                    std::uint64_t N, std::uint64_t seed) {
  if (N < 20) throw usage_error("counterexample construction requires N >= 20");

  CounterexampleReport rep;
  rep.n = N;
  rep.seed = seed;

  // Gate 1: the construction is only sound for homogeneous monotone means.
  rep.axioms = check_axioms(mean, 256, DimRange{1, 6}, seed);
  const AxiomResult& homog = rep.axioms.find("homogeneity");
  const AxiomResult& mono = rep.axioms.find("monotonicity");
  if (!homog.pass || !mono.pass) {
    rep.verdict = CexVerdict::refused;
    rep.refusal_reason =
        "mean failed a gating axiom: " + witness_text(homog.pass ? mono : homog);
    return rep;
  }

  // Gate 2: the premise — divergent series with ratios growing without bound.
  rep.divergence = hardy_divergence_test(mean, seq, N);
  if (rep.divergence.holds != TriState::holds) {
    rep.verdict = CexVerdict::refused;
    rep.refusal_reason =
        std::string("divergence premise not established on [1, N]: ") +
        to_string(rep.divergence.holds);
    return rep;
  }

  const SeriesBuffer buf = materialize(seq, N);
  rep.a = buf.terms;
  rep.c = ratio_sequence(mean, rep.a);

  // Boundedness: beyond the last index with c <= 1 every term sits below the
  // running prefix mean, so max(a_1..a_n0) dominates the whole series.
  rep.n0 = 1;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (rep.c[n - 1] <= 1.0) rep.n0 = n;
  }
  rep.bound_on_a = *std::max_element(rep.a.begin(), rep.a.begin() + rep.n0);
  const double global_max = *std::max_element(rep.a.begin(), rep.a.end());
  rep.bound_verified = global_max <= rep.bound_on_a * (1.0 + 1e-12);

  // Case dispatch: analytic infimum class when the rule knows it, numeric
  // threshold otherwise.
  bool inf_positive = false;
  switch (seq.infimum_class()) {
    case SeqSpec::InfClass::positive: inf_positive = true; break;
    case SeqSpec::InfClass::zero: inf_positive = false; break;
    case SeqSpec::InfClass::unknown: {
      const double amin = *std::min_element(rep.a.begin(), rep.a.end());
      inf_positive = amin > kInfThresholdRel * global_max;
      rep.notes.push_back("infimum class decided numerically (rule is opaque)");
      break;
    }
  }

  rep.partition = inf_positive ? build_blocks_case1(rep.c, rep.a, N)
                               : build_blocks_case2(rep.a, rep.c, N);
  if (rep.partition.short_partition) {
    rep.notes.push_back("fewer than two complete blocks; partition is short");
  }

  const auto bounds = rep.partition.r_boundaries();
  const auto r_vals = rep.partition.r_values();
  rep.base_r = emit_r(bounds, r_vals, N);
  rep.strict_r = strictify(rep.base_r);
  rep.r_strictly_decreasing = rep.strict_r.strictified;
  rep.truncated_tail = bounds.back() < N;
  if (rep.truncated_tail) {
    rep.notes.push_back("damping past the last complete block extends its R");
  }

  // Damped series and its prefix means, streamed once.
  rep.b.resize(N);
  rep.sum_b.resize(N);
  rep.mean_of_b.resize(N);
  rep.mean_sums.resize(N);
  {
    MeanAccumulator acc(mean);
    KahanSum sb;
    KahanSum ms;
    for (std::uint64_t n = 1; n <= N; ++n) {
      const double bn = rep.a[n - 1] * rep.strict_r.values[n - 1];
      rep.b[n - 1] = bn;
      sb.add(bn);
      rep.sum_b[n - 1] = sb.value();
      acc.push(bn);
      const double m = acc.value();
      rep.mean_of_b[n - 1] = m;
      ms.add(m);
      rep.mean_sums[n - 1] = ms.value();
    }
    rep.sum_b_total = sb.value();
    rep.mean_sum_total = ms.value();
  }

  rep.certificates = check_certificates(rep.a, rep.c, rep.strict_r.values,
                                        rep.mean_of_b, &rep.certificate_flags);
  if (rep.certificates.violations > 0) {
    std::ostringstream os;
    os << "certificate violated at n = " << rep.certificates.first_violation_n
       << ": mean " << rep.certificates.lhs_at_worst << " < target "
       << rep.certificates.rhs_at_worst
       << "; the gated axioms make this a construction fault";
    throw numerical_fault(os.str());
  }

  // Per-block identities on the unstrictified damping.
  KahanSum bound_total;
  bool identities_ok = true;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    IdentityBlock blk;
    blk.level = j;
    blk.n_lo = bounds[j];
    blk.n_hi = bounds[j + 1];
    KahanSum ar;
    KahanSum acr;
    for (std::uint64_t n = blk.n_lo + 1; n <= blk.n_hi; ++n) {
      const double w = rep.a[n - 1] * rep.base_r.values[n - 1];
      ar.add(w);
      acr.add(w * rep.c[n - 1]);
    }
    const double level = static_cast<double>(j);
    blk.sum_ar = ar.value();
    blk.expected_ar = 1.0 / ((level + 1.0) * (level + 1.0));
    blk.sum_acr = acr.value();
    blk.lower_acr = level / ((level + 1.0) * (level + 1.0));
    blk.ar_ok = std::abs(blk.sum_ar - blk.expected_ar) <=
                kIdentitySlack * blk.expected_ar;
    blk.acr_ok = blk.sum_acr >= blk.lower_acr - kIdentitySlack;
    identities_ok = identities_ok && blk.ar_ok && blk.acr_ok;
    bound_total.add(blk.lower_acr);
    rep.identities.push_back(blk);
  }
  rep.identity_bound_total = bound_total.value();
  if (!identities_ok) {
    throw numerical_fault(
        "a block identity missed its construction-exact target");
  }

  // Tail stability of sum b: no single increment in the last decade may move
  // the total by more than 1e-6 relative.
  const std::uint64_t tail_start = N / 10;
  double tail_max = 0.0;
  for (std::uint64_t n = tail_start + 1; n <= N; ++n) {
    tail_max = std::max(tail_max, rep.b[n - 1]);
  }
  rep.tail_max_increment_rel = tail_max / std::max(rep.sum_b_total, 1e-300);
  rep.tail_stable = rep.tail_max_increment_rel < kTailIncrementRel;

  if (rep.tail_stable) {
    rep.verdict = CexVerdict::constructed;
  } else {
    rep.verdict = CexVerdict::inconclusive;
    rep.notes.push_back(
        "sum of b has not stabilized within [1, N]; increase N");
  }
  return rep;
}

}  // namespace hardylab
