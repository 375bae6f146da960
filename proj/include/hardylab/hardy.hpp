#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hardylab/mean.hpp"
#include "hardylab/sequence.hpp"

namespace hardylab {

using ordered_json = nlohmann::ordered_json;

/// Log-spaced checkpoint grid {10^3, 10^(3+step), ...} capped and completed
/// by N. Requires N >= 1000.
std::vector<std::uint64_t> log_checkpoints(std::uint64_t N, double step_exp);

/// Reads HARDYLAB_CHECKPOINTS (exponent step, default 0.5). Invalid or
/// out-of-range values are a usage error.
double checkpoint_step_from_env();

enum class EstimateVerdict { converged, diverging, inconclusive };

std::string to_string(EstimateVerdict v);

/// Trajectory of t_n = M(1, 1/2, ..., 1/n) / (1/n) at the checkpoint grid,
/// together with a verdict: converged when the relative drift across the two
/// final checkpoints is below tol; diverging when the trajectory fits
/// c1 + c2*ln(n) with a significantly positive c2; inconclusive otherwise.
struct HardyEstimate {
  std::vector<std::pair<std::uint64_t, double>> trajectory;
  double final_value = 0.0;
  EstimateVerdict verdict = EstimateVerdict::inconclusive;
  double tol = 0.0;
  double checkpoint_step = 0.5;
  // diagnostics
  double last_drift = 0.0;       // relative drift across the final two checkpoints
  double fit_intercept = 0.0;    // c1 of t ~ c1 + c2 ln n
  double fit_slope = 0.0;        // c2
  double fit_r_squared = 0.0;
  double modeled_growth = 0.0;   // c2 * (ln n_last - ln n_first)
};

HardyEstimate hardy_constant_estimate(const MeanSpec& spec, std::uint64_t N,
                                      double tol, double checkpoint_step = 0.5);

/// Ratio of the summed prefix means to the summed terms over [1, N].
struct HardyRatio {
  double ratio = 0.0;
  double numerator = 0.0;    // sum of M(a_1..a_n)
  double denominator = 0.0;  // sum of a_n
  std::uint64_t n = 0;
  std::vector<std::pair<std::uint64_t, double>> trajectory;  // ratio at decades
};

HardyRatio hardy_ratio(const MeanSpec& spec, const SeqSpec& seq,
                       std::uint64_t N);

/// c_n = M(a_1..a_n) / a_n for n = 1..N (position i holds n = i+1).
std::vector<double> ratio_sequence(const MeanSpec& spec,
                                   std::span<const double> terms);
std::vector<double> ratio_sequence(const MeanSpec& spec, const SeqSpec& seq,
                                   std::uint64_t N);

enum class TriState { holds, fails, inconclusive };

std::string to_string(TriState t);

/// Outcome of a truncated hypothesis test plus the numbers it was decided on.
struct TestVerdict {
  std::string test;
  TriState holds = TriState::inconclusive;
  ordered_json evidence;
};

/// Tests the premise pair "sum a_n diverges and c_n = M(prefix)/a_n tends to
/// infinity" on the first N terms. Divergence of the sum is taken from the
/// rule when analytic; divergence of c_n uses the trailing-window criterion:
/// window minima strictly increase across the final three windows, the last
/// window minimum exceeds every earlier window maximum, and the last window
/// maximum exceeds the first by at least 5 percent. "fails" means the data
/// contradicts the premise (sum converges, or c_n stabilized within 1 percent
/// across the last two windows). window = 0 selects N/10.
TestVerdict hardy_divergence_test(const MeanSpec& spec, const SeqSpec& seq,
                                  std::uint64_t N, std::uint64_t window = 0);

/// Same decision applied to an already materialized ratio sequence.
TestVerdict ratio_divergence_verdict(std::span<const double> c,
                                     std::uint64_t window,
                                     SeqSpec::Divergence sum_divergence,
                                     bool sum_divergence_heuristic);

/// Largest epsilon such that c_n >= epsilon * max(c_1..c_n) on the whole
/// prefix, with the pair (m, n) realizing the minimum ratio (m = index of the
/// running maximum, n = index of the dip). Equals 1 exactly when c is
/// nondecreasing.
struct EpsilonEstimate {
  double epsilon = 1.0;
  std::uint64_t max_index = 1;  // m
  std::uint64_t dip_index = 1;  // n
};

EpsilonEstimate nearly_increasing_epsilon(std::span<const double> c);

/// HEURISTIC convergence scan of the damped series sum a_n^(1+s) * m_n^(-s)
/// for each s in the grid. Convergent: every increment in the trailing
/// decade (N/10, N] is below 1e-9 of the total and the increments do not
/// increase. Divergent: decade block sums do not decrease across the last
/// three complete decades, or their fitted power-law decay exponent is at
/// most 0.9 (a series with block sums ~ j^-beta diverges for beta <= 1).
/// Everything else is inconclusive. The verdict is truncated evidence, not a
/// proof; the evidence block carries the decade sums for audit.
struct DampedScanResult {
  double s = 0.0;
  TriState verdict = TriState::inconclusive;
  ordered_json evidence;
};

std::vector<DampedScanResult> damped_series_scan(std::span<const double> a,
                                                 std::span<const double> m,
                                                 std::span<const double> s_grid);

/// Checks m_n >= C * (ln n)^D / n for every n in [n0, N]. Reports the first
/// violation. Requires C > 0, D > 0, 2 <= n0 < N <= len(m).
TestVerdict log_growth_check(std::span<const double> m, double C, double D,
                             std::uint64_t n0, std::uint64_t N);

}  // namespace hardylab
