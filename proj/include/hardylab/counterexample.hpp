#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hardylab/axioms.hpp"
#include "hardylab/blocks.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/mean.hpp"
#include "hardylab/sequence.hpp"

namespace hardylab {

/// Exact per-block sums of the damped series against their construction
/// targets: sum of a*r must equal 1/(level+1)^2 and sum of a*c*r must clear
/// level/(level+1)^2.
struct IdentityBlock {
  std::uint64_t level = 0;  // block index, doubles as the ratio threshold
  std::uint64_t n_lo = 0;   // block covers (n_lo, n_hi]
  std::uint64_t n_hi = 0;
  double sum_ar = 0.0;
  double expected_ar = 0.0;
  double sum_acr = 0.0;
  double lower_acr = 0.0;
  bool ar_ok = false;
  bool acr_ok = false;
};

/// Per-term certificate scan of M(b_1..b_n) >= c_n * a_n * r_n.
struct CertificateStats {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::uint64_t first_violation_n = 0;  // 0 when clean
  double worst_margin_rel = 0.0;        // min over n of (lhs-rhs)/max(|lhs|,|rhs|)
  double lhs_at_worst = 0.0;
  double rhs_at_worst = 0.0;
};

/// Array-level certificate check with 1e-12 relative slack; flags[i] mirrors
/// the per-term outcome when a flag buffer is supplied.
CertificateStats check_certificates(std::span<const double> a,
                                    std::span<const double> c,
                                    std::span<const double> r,
                                    std::span<const double> mean_of_b,
                                    std::vector<std::uint8_t>* flags = nullptr);

enum class CexVerdict { constructed, refused, inconclusive };

std::string to_string(CexVerdict v);

/// Full deterministic construction record. On refusal only the gate evidence
/// is populated; on construction every array spans [1, N].
struct CounterexampleReport {
  CexVerdict verdict = CexVerdict::refused;
  std::string refusal_reason;

  PropertyReport axioms;
  TestVerdict divergence;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  std::uint64_t n0 = 0;          // last index with ratio <= 1
  double bound_on_a = 0.0;       // max(a_1..a_n0)
  bool bound_verified = false;   // max over [1, N] equals the bound

  BlockPartition partition;
  RSequence base_r;
  RSequence strict_r;

  std::vector<double> a;
  std::vector<double> c;
  std::vector<double> b;           // a_n * strict r_n
  std::vector<double> sum_b;       // compensated partial sums of b
  std::vector<double> mean_of_b;   // M(b_1..b_n)
  std::vector<double> mean_sums;   // partial sums of mean_of_b

  std::vector<std::uint8_t> certificate_flags;
  CertificateStats certificates;
  std::vector<IdentityBlock> identities;
  double identity_bound_total = 0.0;  // sum of level/(level+1)^2

  bool r_strictly_decreasing = false;
  bool tail_stable = false;
  double tail_max_increment_rel = 0.0;
  double sum_b_total = 0.0;
  double mean_sum_total = 0.0;
  bool truncated_tail = false;  // r extends past the last complete block

  std::vector<std::string> notes;
};

/// Gates on the axioms (homogeneity and monotonicity) and on the divergence
/// premise, then runs the block construction and verifies every per-term
/// certificate and per-block identity. Gate failures refuse; certificate or
/// identity failures are construction faults and throw.
CounterexampleReport counterexample(const MeanSpec& mean, const SeqSpec& seq,
                                    std::uint64_t N, std::uint64_t seed = 42);

}  // namespace hardylab
