#include "hardylab/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hardylab/errors.hpp"

namespace hardylab {

namespace {

// Entries are drawn log-uniform from this range: wide enough to stress
// homogeneity and concavity, tame enough that every family stays far from
// overflow.
constexpr double kEntryLo = 0.01;
constexpr double kEntryHi = 100.0;

double uniform01(std::mt19937_64& rng) {
  // 53 random bits mapped to [0, 1). Portable across standard libraries,
  // unlike std::uniform_real_distribution.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = uniform01(rng);
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

std::vector<double> random_vector(std::mt19937_64& rng, DimRange dims) {
  const std::uint64_t span = dims.hi - dims.lo + 1;
  const auto d = static_cast<std::size_t>(dims.lo + rng() % span);
  std::vector<double> v(d);
  for (auto& e : v) e = log_uniform(rng, kEntryLo, kEntryHi);
  return v;
}

double rel_gap(double lhs, double rhs) {
  const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
  return (rhs - lhs) / scale;  // positive when the inequality lhs >= rhs fails
}

struct TrialOutcome {
  std::vector<double> x;
  std::vector<double> y;
  double scalar = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;  // relative; <= 0 means clean
};

class AxiomRunner {
 public:
  AxiomRunner(const MeanSpec& spec, std::uint64_t trials, DimRange dims,
              std::uint64_t seed, double tol)
      : spec_(spec), trials_(trials), dims_(dims), seed_(seed), tol_(tol) {}

  template <typename TrialFn>
  AxiomResult run(const std::string& name, std::uint64_t index, TrialFn fn) {
    AxiomResult res;
    res.name = name;
    res.trials = trials_;
    // Each axiom gets an independent deterministic stream so reordering one
    // check never perturbs another.
    std::mt19937_64 rng(seed_ ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    for (std::uint64_t t = 0; t < trials_; ++t) {
      TrialOutcome o = fn(rng, t);
      if (o.violation > res.worst_violation) {
        res.worst_violation = o.violation;
      }
      if (o.violation > tol_ && !res.witness) {
        AxiomWitness w;
        w.axiom = name;
        w.x = std::move(o.x);
        w.y = std::move(o.y);
        w.scalar = o.scalar;
        w.lhs = o.lhs;
        w.rhs = o.rhs;
        w.violation = o.violation;
        w.trial = t;
        res.witness = std::move(w);
      }
    }
    res.pass = res.worst_violation <= tol_;
    return res;
  }

 private:
  const MeanSpec& spec_;
  std::uint64_t trials_;
  DimRange dims_;
  std::uint64_t seed_;
  double tol_;

 public:
  TrialOutcome bounds_trial(std::mt19937_64& rng, std::uint64_t) {
    TrialOutcome o;
    o.x = random_vector(rng, dims_);
    const double m = eval_mean(spec_, o.x);
    const double lo = *std::min_element(o.x.begin(), o.x.end());
    const double hi = *std::max_element(o.x.begin(), o.x.end());
    o.lhs = m;
    o.rhs = lo;
    // Violation is how far the mean escapes [min, max] on either side.
    o.violation = std::max(rel_gap(m, lo), rel_gap(hi, m));
    if (o.violation == rel_gap(hi, m)) {
      o.rhs = hi;
    }
    return o;
  }

  TrialOutcome symmetry_trial(std::mt19937_64& rng, std::uint64_t) {
    TrialOutcome o;
    o.x = random_vector(rng, dims_);
    std::vector<double> shuffled = o.x;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng() % i]);
    }
    o.y = shuffled;
    o.lhs = eval_mean(spec_, o.x);
    o.rhs = eval_mean(spec_, shuffled);
    o.violation = std::fabs(rel_gap(o.lhs, o.rhs));
    return o;
  }

  TrialOutcome homogeneity_trial(std::mt19937_64& rng, std::uint64_t) {
    TrialOutcome o;
    o.x = random_vector(rng, dims_);
    o.scalar = log_uniform(rng, 0.01, 100.0);
    std::vector<double> scaled(o.x.size());
    for (std::size_t i = 0; i < o.x.size(); ++i) scaled[i] = o.scalar * o.x[i];
    o.lhs = eval_mean(spec_, scaled);
    o.rhs = o.scalar * eval_mean(spec_, o.x);
    o.violation = std::fabs(rel_gap(o.lhs, o.rhs));
    return o;
  }

  TrialOutcome monotonicity_trial(std::mt19937_64& rng, std::uint64_t) {
    TrialOutcome o;
    o.x = random_vector(rng, dims_);
    std::vector<double> bumped = o.x;
    const std::size_t j = rng() % bumped.size();
    bumped[j] *= 1.0 + uniform01(rng);
    o.y = bumped;
    o.lhs = eval_mean(spec_, bumped);
    o.rhs = eval_mean(spec_, o.x);
    o.violation = rel_gap(o.lhs, o.rhs);  // requires M(bumped) >= M(x)
    return o;
  }

  TrialOutcome repetition_trial(std::mt19937_64& rng, std::uint64_t) {
    static constexpr int kFactors[] = {2, 3, 7};
    TrialOutcome o;
    o.x = random_vector(rng, dims_);
    const int m = kFactors[rng() % 3];
    o.scalar = m;
    std::vector<double> repeated;
    repeated.reserve(o.x.size() * m);
    for (double e : o.x) {
      for (int i = 0; i < m; ++i) repeated.push_back(e);
    }
    o.lhs = eval_mean(spec_, repeated);
    o.rhs = eval_mean(spec_, o.x);
    o.violation = std::fabs(rel_gap(o.lhs, o.rhs));
    return o;
  }

  TrialOutcome concavity_trial(std::mt19937_64& rng, std::uint64_t t) {
    TrialOutcome o;
    if (t == 0) {
      // Fixed probe: midpoint is constant while the endpoints are spread.
      o.x = {0.1, 1.0};
      o.y = {1.0, 0.1};
    } else if (t == 1) {
      o.x = {1.0, 2.0, 3.0};
      o.y = {3.0, 2.0, 1.0};
    } else {
      o.x = random_vector(rng, dims_);
      o.y.resize(o.x.size());
      for (auto& e : o.y) e = log_uniform(rng, kEntryLo, kEntryHi);
    }
    std::vector<double> mid(o.x.size());
    for (std::size_t i = 0; i < mid.size(); ++i) {
      mid[i] = 0.5 * (o.x[i] + o.y[i]);
    }
    o.lhs = eval_mean(spec_, mid);
    o.rhs = 0.5 * (eval_mean(spec_, o.x) + eval_mean(spec_, o.y));
    o.violation = rel_gap(o.lhs, o.rhs);  // requires M(mid) >= avg of means
    return o;
  }
};

}  // namespace

const AxiomResult& PropertyReport::find(const std::string& name) const {
  for (const auto& a : axioms) {
    if (a.name == name) return a;
  }
  throw usage_error("no axiom named '" + name + "' in report");
}

PropertyReport check_axioms(const MeanSpec& spec, std::uint64_t trials,
                            DimRange dims, std::uint64_t seed, double tol) {
  if (trials == 0) throw usage_error("axiom check needs at least one trial");
  if (dims.lo == 0 || dims.hi < dims.lo) {
    throw usage_error("dimension range must satisfy 1 <= lo <= hi");
  }
  AxiomRunner runner(spec, trials, dims, seed, tol);
  PropertyReport report;
  report.seed = seed;
  report.trials = trials;
  report.tolerance = tol;
  report.axioms.push_back(runner.run(
      "mean_value_bounds", 0,
      [&](std::mt19937_64& r, std::uint64_t t) { return runner.bounds_trial(r, t); }));
  report.axioms.push_back(runner.run(
      "symmetry", 1,
      [&](std::mt19937_64& r, std::uint64_t t) { return runner.symmetry_trial(r, t); }));
  report.axioms.push_back(runner.run(
      "homogeneity", 2,
      [&](std::mt19937_64& r, std::uint64_t t) { return runner.homogeneity_trial(r, t); }));
  report.axioms.push_back(runner.run(
      "monotonicity", 3,
      [&](std::mt19937_64& r, std::uint64_t t) { return runner.monotonicity_trial(r, t); }));
  report.axioms.push_back(runner.run(
      "repetition_invariance", 4,
      [&](std::mt19937_64& r, std::uint64_t t) { return runner.repetition_trial(r, t); }));
  report.axioms.push_back(runner.run(
      "midpoint_concavity", 5,
      [&](std::mt19937_64& r, std::uint64_t t) { return runner.concavity_trial(r, t); }));
  for (const auto& a : report.axioms) report.all_pass = report.all_pass && a.pass;
  return report;
}

}  // namespace hardylab
