#include "hardylab/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "hardylab/errors.hpp"
#include "hardylab/kahan.hpp"

namespace hardylab {

namespace {

constexpr double kTiny = 1e-300;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool valid = false;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  LineFit f;
  const std::size_t n = xs.size();
  if (n < 3 || ys.size() != n) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = (syy <= 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  f.valid = true;
  return f;
}

double rel_change(double next, double prev) {
  return std::abs(next - prev) / std::max({std::abs(next), std::abs(prev), kTiny});
}

/// Decade-block summary of a positive series, shared by the damped-series
/// scan and the heuristic divergence classifier for opaque sequences.
struct BlockDecay {
  std::vector<double> block_sums;  // complete decades: [1,10], (10,100], ...
  double total = 0.0;
  double tail_max_rel = 0.0;       // largest term in (N/10, N], relative to total
  bool tail_nonincreasing = true;  // terms within (N/10, N] never increase
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  bool blocks_nondecreasing = false;  // last three complete decades
};

BlockDecay analyze_decay(std::span<const double> terms) {
  BlockDecay d;
  const std::uint64_t N = terms.size();
  KahanSum total;
  KahanSum block;
  std::uint64_t block_end = 10;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double t = terms[n - 1];
    total.add(t);
    block.add(t);
    if (n == block_end) {
      d.block_sums.push_back(block.value());
      block.reset();
      block_end *= 10;
    }
  }
  d.total = total.value();

  const std::uint64_t tail_start = N / 10;  // tail covers n in (N/10, N]
  double tail_max = 0.0;
  for (std::uint64_t n = tail_start + 1; n <= N; ++n) {
    const double t = terms[n - 1];
    tail_max = std::max(tail_max, t);
    if (n > tail_start + 1 && t > terms[n - 2] * (1.0 + 1e-12)) {
      d.tail_nonincreasing = false;
    }
  }
  d.tail_max_rel = tail_max / std::max(d.total, kTiny);

  const std::size_t J = d.block_sums.size();
  if (J >= 3) {
    const double b1 = d.block_sums[J - 3];
    const double b2 = d.block_sums[J - 2];
    const double b3 = d.block_sums[J - 1];
    d.blocks_nondecreasing = b2 >= b1 * (1.0 - 1e-9) && b3 >= b2 * (1.0 - 1e-9);
  }
  // Power-law decay fit ln B_j ~ -beta ln j over complete decades j >= 2.
  std::vector<double> xs, ys;
  for (std::size_t j = 2; j <= J; ++j) {
    const double b = d.block_sums[j - 1];
    if (b > 0.0) {
      xs.push_back(std::log(static_cast<double>(j)));
      ys.push_back(std::log(b));
    }
  }
  if (const LineFit f = fit_line(xs, ys); f.valid) {
    d.fitted_exponent = -f.slope;
  }
  return d;
}

/// Truncated convergence read of a positive series from its decade profile.
/// Convergent demands a provably negligible, nonincreasing tail; divergent
/// demands block sums that stopped decaying or decay slower than j^-0.9
/// (block sums ~ j^-beta give a divergent series for beta <= 1).
TriState classify_decay(const BlockDecay& d) {
  if (d.tail_max_rel < 1e-9 && d.tail_nonincreasing) return TriState::holds;
  if (d.blocks_nondecreasing) return TriState::fails;
  if (!std::isnan(d.fitted_exponent) && d.fitted_exponent <= 0.9) {
    return TriState::fails;
  }
  return TriState::inconclusive;
}

ordered_json decay_evidence(const BlockDecay& d) {
  ordered_json ev;
  ev["total"] = d.total;
  ev["decade_sums"] = d.block_sums;
  ev["tail_max_increment_rel"] = d.tail_max_rel;
  ev["tail_nonincreasing"] = d.tail_nonincreasing;
  if (std::isnan(d.fitted_exponent)) {
    ev["fitted_decay_exponent"] = nullptr;
  } else {
    ev["fitted_decay_exponent"] = d.fitted_exponent;
  }
  ev["decades_nondecreasing"] = d.blocks_nondecreasing;
  return ev;
}

}  // namespace

std::vector<std::uint64_t> log_checkpoints(std::uint64_t N, double step_exp) {
  if (N < 1000) throw usage_error("checkpoint grid requires N >= 1000");
  if (!(step_exp >= 0.01 && step_exp <= 5.0)) {
    throw usage_error("checkpoint step must lie in [0.01, 5]");
  }
  std::vector<std::uint64_t> cps;
  for (double e = 3.0;; e += step_exp) {
    const auto n = static_cast<std::uint64_t>(std::llround(std::pow(10.0, e)));
    if (n >= N) break;
    if (cps.empty() || n > cps.back()) cps.push_back(n);
  }
  cps.push_back(N);
  return cps;
}

double checkpoint_step_from_env() {
  const char* raw = std::getenv("HARDYLAB_CHECKPOINTS");
  if (raw == nullptr || *raw == '\0') return 0.5;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v >= 0.01 && v <= 5.0)) {
    throw usage_error(
        "HARDYLAB_CHECKPOINTS must be a checkpoint exponent step in [0.01, 5]");
  }
  return v;
}

std::string to_string(EstimateVerdict v) {
  switch (v) {
    case EstimateVerdict::converged: return "converged";
    case EstimateVerdict::diverging: return "diverging";
    case EstimateVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(TriState t) {
  switch (t) {
    case TriState::holds: return "holds";
    case TriState::fails: return "fails";
    case TriState::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

HardyEstimate hardy_constant_estimate(const MeanSpec& spec, std::uint64_t N,
                                      double tol, double checkpoint_step) {
  if (!(tol > 0.0)) throw usage_error("tolerance must be positive");
  const std::vector<std::uint64_t> cps = log_checkpoints(N, checkpoint_step);

  HardyEstimate est;
  est.tol = tol;
  est.checkpoint_step = checkpoint_step;
  est.trajectory.reserve(cps.size());

  MeanAccumulator acc(spec);
  std::size_t next = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double a = 1.0 / static_cast<double>(n);
    acc.push(a);
    if (next < cps.size() && n == cps[next]) {
      est.trajectory.emplace_back(n, acc.value() / a);
      ++next;
    }
  }
  est.final_value = est.trajectory.back().second;

  const std::size_t K = est.trajectory.size();
  if (K >= 2) {
    est.last_drift =
        rel_change(est.trajectory[K - 1].second, est.trajectory[K - 2].second);
  }
  std::vector<double> xs, ys;
  xs.reserve(K);
  ys.reserve(K);
  for (const auto& [n, t] : est.trajectory) {
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(t);
  }
  if (const LineFit f = fit_line(xs, ys); f.valid) {
    est.fit_slope = f.slope;
    est.fit_intercept = f.intercept;
    est.fit_r_squared = f.r_squared;
    est.modeled_growth = f.slope * (xs.back() - xs.front());
  }

  if (K >= 2 && est.last_drift < tol) {
    est.verdict = EstimateVerdict::converged;
  } else if (est.fit_slope > 0.0 && est.fit_r_squared >= 0.98 &&
             est.modeled_growth >
                 10.0 * tol * std::max(std::abs(est.final_value), 1.0)) {
    est.verdict = EstimateVerdict::diverging;
  } else {
    est.verdict = EstimateVerdict::inconclusive;
  }
  return est;
}

HardyRatio hardy_ratio(const MeanSpec& spec, const SeqSpec& seq,
                       std::uint64_t N) {
  if (N == 0) throw usage_error("ratio requires N >= 1");
  HardyRatio r;
  r.n = N;
  MeanAccumulator acc(spec);
  KahanSum num;
  KahanSum den;
  std::uint64_t next_decade = 10;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double a = seq.term(n);
    acc.push(a);
    num.add(acc.value());
    den.add(a);
    if (n == next_decade && n < N) {
      r.trajectory.emplace_back(n, num.value() / den.value());
      next_decade *= 10;
    }
  }
  r.numerator = num.value();
  r.denominator = den.value();
  r.ratio = r.numerator / r.denominator;
  r.trajectory.emplace_back(N, r.ratio);
  return r;
}

std::vector<double> ratio_sequence(const MeanSpec& spec,
                                   std::span<const double> terms) {
  std::vector<double> c;
  c.reserve(terms.size());
  MeanAccumulator acc(spec);
  for (const double a : terms) {
    acc.push(a);
    c.push_back(acc.value() / a);
  }
  return c;
}

std::vector<double> ratio_sequence(const MeanSpec& spec, const SeqSpec& seq,
                                   std::uint64_t N) {
  const SeriesBuffer buf = materialize(seq, N);
  return ratio_sequence(spec, buf.terms);
}

EpsilonEstimate nearly_increasing_epsilon(std::span<const double> c) {
  if (c.empty()) throw usage_error("epsilon estimate requires a nonempty sequence");
  EpsilonEstimate e;
  double run_max = c[0];
  std::uint64_t run_max_index = 1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > run_max) {
      run_max = c[i];
      run_max_index = i + 1;
    }
    const double ratio = c[i] / run_max;
    if (ratio < e.epsilon) {
      e.epsilon = ratio;
      e.max_index = run_max_index;
      e.dip_index = i + 1;
    }
  }
  return e;
}

TestVerdict ratio_divergence_verdict(std::span<const double> c,
                                     std::uint64_t window,
                                     SeqSpec::Divergence sum_divergence,
                                     bool sum_divergence_heuristic) {
  const std::uint64_t N = c.size();
  if (window == 0) window = std::max<std::uint64_t>(N / 10, 1);
  if (N < 2 * window) {
    throw usage_error("divergence test requires at least two ratio windows");
  }
  const std::uint64_t K = N / window;  // remainder folds into the last window

  std::vector<double> minima(K), maxima(K);
  for (std::uint64_t j = 0; j < K; ++j) {
    const std::uint64_t lo = j * window;
    const std::uint64_t hi = (j + 1 == K) ? N : (j + 1) * window;
    double mn = c[lo], mx = c[lo];
    for (std::uint64_t i = lo + 1; i < hi; ++i) {
      mn = std::min(mn, c[i]);
      mx = std::max(mx, c[i]);
    }
    minima[j] = mn;
    maxima[j] = mx;
  }

  bool trailing_increasing = false;
  bool exceeds_prior = false;
  if (K >= 3) {
    trailing_increasing = minima[K - 3] < minima[K - 2] && minima[K - 2] < minima[K - 1];
    double prior_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t j = 0; j + 3 < K; ++j) prior_max = std::max(prior_max, maxima[j]);
    exceeds_prior = minima[K - 1] > prior_max;
  }
  const double growth_ratio = maxima[K - 1] / std::max(maxima[0], kTiny);
  const bool growth_ok = growth_ratio >= 1.05;
  const bool ratios_divergent = trailing_increasing && exceeds_prior && growth_ok;

  const double last_drift = rel_change(maxima[K - 1], maxima[K - 2]);
  const bool stabilized = last_drift <= 0.01;

  TestVerdict v;
  v.test = "hardy_divergence_test";
  if (sum_divergence == SeqSpec::Divergence::divergent && ratios_divergent) {
    v.holds = TriState::holds;
  } else if (sum_divergence == SeqSpec::Divergence::convergent || stabilized) {
    v.holds = TriState::fails;
  } else {
    v.holds = TriState::inconclusive;
  }

  ordered_json& ev = v.evidence;
  switch (sum_divergence) {
    case SeqSpec::Divergence::divergent: ev["sum_divergence"] = "divergent"; break;
    case SeqSpec::Divergence::convergent: ev["sum_divergence"] = "convergent"; break;
    case SeqSpec::Divergence::unknown: ev["sum_divergence"] = "unknown"; break;
  }
  ev["sum_divergence_source"] = sum_divergence_heuristic ? "heuristic" : "rule";
  ev["n"] = N;
  ev["window"] = window;
  ev["windows"] = K;
  ev["window_minima"] = minima;
  ev["window_maxima"] = maxima;
  ev["trailing_minima_increasing"] = trailing_increasing;
  ev["last_min_exceeds_prior_max"] = exceeds_prior;
  ev["growth_ratio"] = growth_ratio;
  ev["last_window_drift"] = last_drift;
  ev["ratio_divergent"] = ratios_divergent;
  ev["stabilized"] = stabilized;
  return v;
}

TestVerdict hardy_divergence_test(const MeanSpec& spec, const SeqSpec& seq,
                                  std::uint64_t N, std::uint64_t window) {
  if (N < 20) throw usage_error("divergence test requires N >= 20");
  const SeriesBuffer buf = materialize(seq, N);
  const std::vector<double> c = ratio_sequence(spec, buf.terms);

  SeqSpec::Divergence div = seq.sum_divergence();
  bool heuristic = false;
  ordered_json heuristic_ev;
  if (div == SeqSpec::Divergence::unknown) {
    heuristic = true;
    const BlockDecay d = analyze_decay(buf.terms);
    switch (classify_decay(d)) {
      case TriState::holds: div = SeqSpec::Divergence::convergent; break;
      case TriState::fails: div = SeqSpec::Divergence::divergent; break;
      case TriState::inconclusive: break;
    }
    heuristic_ev = decay_evidence(d);
  }

  TestVerdict v = ratio_divergence_verdict(c, window, div, heuristic);
  if (heuristic) v.evidence["sum_divergence_decay"] = heuristic_ev;
  return v;
}

std::vector<DampedScanResult> damped_series_scan(std::span<const double> a,
                                                 std::span<const double> m,
                                                 std::span<const double> s_grid) {
  if (a.size() != m.size() || a.size() < 2) {
    throw usage_error("damped scan requires matching inputs with N >= 2");
  }
  std::vector<DampedScanResult> out;
  out.reserve(s_grid.size());
  std::vector<double> u(a.size());
  for (const double s : s_grid) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw usage_error("damping exponent s must be positive and finite");
    }
    // u_n = a_n^(1+s) * m_n^(-s), formed in the log domain so extreme
    // magnitudes underflow to zero instead of overflowing.
    for (std::size_t i = 0; i < a.size(); ++i) {
      u[i] = std::exp((1.0 + s) * std::log(a[i]) - s * std::log(m[i]));
    }
    const BlockDecay d = analyze_decay(u);
    DampedScanResult r;
    r.s = s;
    switch (classify_decay(d)) {
      case TriState::holds: r.verdict = TriState::holds; break;
      case TriState::fails: r.verdict = TriState::fails; break;
      case TriState::inconclusive: r.verdict = TriState::inconclusive; break;
    }
    r.evidence = decay_evidence(d);
    r.evidence["note"] = "HEURISTIC truncated-series read, not a proof";
    out.push_back(std::move(r));
  }
  return out;
}

TestVerdict log_growth_check(std::span<const double> m, double C, double D,
                             std::uint64_t n0, std::uint64_t N) {
  if (!(C > 0.0) || !(D > 0.0)) {
    throw usage_error("log growth check requires C > 0 and D > 0");
  }
  if (n0 < 2 || n0 >= N || N > m.size()) {
    throw usage_error("log growth check requires 2 <= n0 < N <= len(m)");
  }
  TestVerdict v;
  v.test = "log_growth_check";
  v.evidence["C"] = C;
  v.evidence["D"] = D;
  v.evidence["n0"] = n0;
  v.evidence["N"] = N;

  double min_margin = std::numeric_limits<double>::infinity();
  std::uint64_t argmin = n0;
  for (std::uint64_t n = n0; n <= N; ++n) {
    const double threshold =
        C * std::pow(std::log(static_cast<double>(n)), D) / static_cast<double>(n);
    const double margin = m[n - 1] - threshold;
    if (margin < 0.0) {
      v.holds = TriState::fails;
      v.evidence["first_violation_n"] = n;
      v.evidence["term"] = m[n - 1];
      v.evidence["threshold"] = threshold;
      return v;
    }
    if (margin < min_margin) {
      min_margin = margin;
      argmin = n;
    }
  }
  v.holds = TriState::holds;
  v.evidence["min_margin"] = min_margin;
  v.evidence["min_margin_n"] = argmin;
  return v;
}

}  // namespace hardylab
