#include "hardylab/mean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardylab/errors.hpp"

namespace hardylab {

namespace {

// Working domain for the construction-time monotonicity sample. Wide enough
// to expose sign changes of typical generator derivatives, narrow enough that
// exp-heavy generators stay finite.
constexpr double kWorkingLo = 0.1;
constexpr double kWorkingHi = 10.0;

}  // namespace

MeanSpec MeanSpec::arithmetic() {
  MeanSpec s;
  s.family = MeanFamily::arithmetic;
  return s;
}

MeanSpec MeanSpec::geometric() {
  MeanSpec s;
  s.family = MeanFamily::geometric;
  return s;
}

MeanSpec MeanSpec::harmonic() {
  MeanSpec s;
  s.family = MeanFamily::harmonic;
  return s;
}

MeanSpec MeanSpec::power(double p) {
  if (!std::isfinite(p)) throw usage_error("power exponent must be finite");
  MeanSpec s;
  s.family = MeanFamily::power;
  s.p = p;
  return s;
}

MeanSpec MeanSpec::min() {
  MeanSpec s;
  s.family = MeanFamily::min;
  return s;
}

MeanSpec MeanSpec::max() {
  MeanSpec s;
  s.family = MeanFamily::max;
  return s;
}

MeanSpec MeanSpec::quasiarithmetic(const std::string& generator_in_x) {
  MeanSpec s;
  s.family = MeanFamily::quasiarithmetic;
  s.generator_text = generator_in_x;
  s.generator = expr::parse_generator(generator_in_x);
  if (expr::sampled_monotone_direction(*s.generator, kWorkingLo, kWorkingHi) ==
      0) {
    throw usage_error(
        "quasiarithmetic generator is not strictly monotone on the working "
        "domain [0.1, 10] (checked at 64 points)");
  }
  return s;
}

std::string MeanSpec::describe() const {
  switch (family) {
    case MeanFamily::arithmetic:
      return "arithmetic";
    case MeanFamily::geometric:
      return "geometric";
    case MeanFamily::harmonic:
      return "harmonic";
    case MeanFamily::power:
      return "power:" + std::to_string(p);
    case MeanFamily::min:
      return "min";
    case MeanFamily::max:
      return "max";
    case MeanFamily::quasiarithmetic:
      return "quasiarithmetic:" + generator_text;
  }
  return "?";
}

MeanAccumulator::MeanAccumulator(const MeanSpec& spec) : spec_(spec) {
  if (spec_.family == MeanFamily::quasiarithmetic) {
    if (!spec_.generator) {
      throw usage_error("quasiarithmetic spec has no generator");
    }
    // Recognize the shapes with closed-form inverses; everything else falls
    // back to bracketed bisection over the spanned data range.
    const expr::Node& g = *spec_.generator;
    using expr::NodeKind;
    if (g.kind == NodeKind::variable) {
      inverse_ = Inverse::identity;
    } else if (g.kind == NodeKind::log_fn &&
               g.lhs->kind == NodeKind::variable) {
      inverse_ = Inverse::exp_of;
    } else if (g.kind == NodeKind::exp_fn &&
               g.lhs->kind == NodeKind::variable) {
      inverse_ = Inverse::log_of;
    } else if (g.kind == NodeKind::pow && g.lhs->kind == NodeKind::variable &&
               g.rhs->kind == NodeKind::literal && g.rhs->value != 0.0) {
      inverse_ = Inverse::root;
      inverse_p_ = g.rhs->value;
    }
  }
}

void MeanAccumulator::push(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw usage_error("mean accumulator requires strictly positive finite terms");
  }
  if (count_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  switch (spec_.family) {
    case MeanFamily::arithmetic:
      plain_.add(x);
      break;
    case MeanFamily::harmonic:
      plain_.add(1.0 / x);
      break;
    case MeanFamily::geometric:
      plain_.add(std::log(x));
      break;
    case MeanFamily::power: {
      if (spec_.p == 0.0) {
        plain_.add(std::log(x));
        break;
      }
      const double t = spec_.p * std::log(x);
      if (count_ == 0) {
        peak_t_ = t;
        scaled_.add(1.0);
      } else if (t <= peak_t_) {
        scaled_.add(std::exp(t - peak_t_));
      } else {
        scaled_.scale(std::exp(peak_t_ - t));
        scaled_.add(1.0);
        peak_t_ = t;
      }
      break;
    }
    case MeanFamily::min:
      running_ = (count_ == 0) ? x : std::min(running_, x);
      break;
    case MeanFamily::max:
      running_ = (count_ == 0) ? x : std::max(running_, x);
      break;
    case MeanFamily::quasiarithmetic:
      plain_.add(expr::eval_expr(*spec_.generator, x));
      break;
  }
  ++count_;
}

void MeanAccumulator::ensure_generator_monotone() const {
  if (inverse_ != Inverse::none) return;  // known monotone shapes
  if (min_ == max_) return;
  // Re-sample only when the spanned range grew past the last verified one.
  if (checked_lo_ != 0.0 && min_ >= checked_lo_ && max_ <= checked_hi_) return;
  if (expr::sampled_monotone_direction(*spec_.generator, min_, max_) == 0) {
    throw usage_error(
        "quasiarithmetic generator is not strictly monotone on the spanned "
        "range (checked at 64 points)");
  }
  checked_lo_ = min_;
  checked_hi_ = max_;
}

double MeanAccumulator::invert_generator(double y) const {
  switch (inverse_) {
    case Inverse::identity:
      return y;
    case Inverse::exp_of:
      return std::exp(y);
    case Inverse::log_of:
      if (y <= 0.0) {
        throw numerical_fault("generator average left the range of exp");
      }
      return std::log(y);
    case Inverse::root:
      if (y < 0.0) {
        throw numerical_fault("generator average left the range of x^p");
      }
      return std::pow(y, 1.0 / inverse_p_);
    case Inverse::none:
      break;
  }
  ensure_generator_monotone();
  return expr::invert_monotone(*spec_.generator, y, min_, max_);
}

double MeanAccumulator::value() const {
  if (count_ == 0) {
    throw usage_error("mean of an empty prefix is undefined");
  }
  const double n = static_cast<double>(count_);
  double m = 0.0;
  switch (spec_.family) {
    case MeanFamily::arithmetic:
      m = plain_.value() / n;
      break;
    case MeanFamily::harmonic:
      m = n / plain_.value();
      break;
    case MeanFamily::geometric:
      m = std::exp(plain_.value() / n);
      break;
    case MeanFamily::power: {
      if (spec_.p == 0.0) {
        m = std::exp(plain_.value() / n);
        break;
      }
      const double s = scaled_.value();
      if (!(s > 0.0)) {
        throw numerical_fault("power mean accumulator lost all mass");
      }
      m = std::exp((peak_t_ + std::log(s / n)) / spec_.p);
      break;
    }
    case MeanFamily::min:
    case MeanFamily::max:
      m = running_;
      break;
    case MeanFamily::quasiarithmetic: {
      if (min_ == max_) {
        m = min_;  // constant data: no inversion needed
        break;
      }
      ensure_generator_monotone();
      m = invert_generator(plain_.value() / n);
      break;
    }
  }
  if (!std::isfinite(m)) {
    throw numerical_fault("mean evaluation produced a non-finite value");
  }
  // Mean-value bounds hold exactly by clamping; the raw result can drift a
  // few ulp past an endpoint through rounding.
  return std::clamp(m, min_, max_);
}

double eval_mean(const MeanSpec& spec, std::span<const double> v) {
  if (v.empty()) throw usage_error("mean of an empty vector is undefined");
  MeanAccumulator acc(spec);
  for (double x : v) acc.push(x);
  return acc.value();
}

std::vector<double> prefix_means(const MeanSpec& spec,
                                 std::span<const double> terms) {
  if (terms.empty()) throw usage_error("prefix means need at least one term");
  std::vector<double> out(terms.size());
  MeanAccumulator acc(spec);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    acc.push(terms[i]);
    out[i] = acc.value();
  }
  return out;
}

std::vector<double> prefix_means(const MeanSpec& spec, const SeqSpec& seq,
                                 std::uint64_t N) {
  SeriesBuffer buf = materialize(seq, N);
  return prefix_means(spec, buf.terms);
}

}  // namespace hardylab
