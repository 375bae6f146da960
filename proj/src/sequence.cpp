#include "hardylab/sequence.hpp"

#include <cmath>

#include "hardylab/errors.hpp"
#include "hardylab/kahan.hpp"

namespace hardylab {

SeqSpec SeqSpec::harmonic() {
  SeqSpec s;
  s.rule = SeqRule::harmonic;
  return s;
}

SeqSpec SeqSpec::powerlaw(double alpha) {
  if (!std::isfinite(alpha)) throw usage_error("powerlaw exponent must be finite");
  SeqSpec s;
  s.rule = SeqRule::powerlaw;
  s.alpha = alpha;
  return s;
}

SeqSpec SeqSpec::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw usage_error("constant sequence value must be positive and finite");
  }
  SeqSpec s;
  s.rule = SeqRule::constant;
  s.value = value;
  return s;
}

SeqSpec SeqSpec::geometric(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw usage_error("geometric ratio must be positive and finite");
  }
  SeqSpec s;
  s.rule = SeqRule::geometric;
  s.q = q;
  return s;
}

SeqSpec SeqSpec::explicit_list(std::vector<double> terms) {
  if (terms.empty()) throw usage_error("explicit sequence needs at least one term");
  for (double t : terms) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw usage_error("explicit sequence terms must be positive and finite");
    }
  }
  SeqSpec s;
  s.rule = SeqRule::explicit_list;
  s.terms = std::move(terms);
  return s;
}

SeqSpec SeqSpec::custom(const std::string& expr_in_x) {
  SeqSpec s;
  s.rule = SeqRule::custom;
  s.expr_text = expr_in_x;
  s.expression = expr::parse_generator(expr_in_x);
  return s;
}

double SeqSpec::term(std::uint64_t n) const {
  if (n == 0) throw usage_error("sequence index is 1-based");
  double v = 0.0;
  switch (rule) {
    case SeqRule::harmonic:
      v = 1.0 / static_cast<double>(n);
      break;
    case SeqRule::powerlaw:
      v = std::pow(static_cast<double>(n), -alpha);
      break;
    case SeqRule::constant:
      v = value;
      break;
    case SeqRule::geometric:
      v = std::pow(q, static_cast<double>(n));
      break;
    case SeqRule::explicit_list:
      if (n > terms.size()) {
        throw usage_error("index past the end of the explicit sequence");
      }
      v = terms[n - 1];
      break;
    case SeqRule::custom:
      v = expr::eval_expr(*expression, static_cast<double>(n));
      break;
  }
  if (!(v > 0.0)) {
    throw numerical_fault("sequence term at n=" + std::to_string(n) +
                          " is not strictly positive (value " +
                          std::to_string(v) + ")");
  }
  if (!std::isfinite(v)) {
    throw numerical_fault("sequence term at n=" + std::to_string(n) +
                          " is not finite");
  }
  return v;
}

SeqSpec::Divergence SeqSpec::sum_divergence() const {
  switch (rule) {
    case SeqRule::harmonic:
      return Divergence::divergent;
    case SeqRule::powerlaw:
      return alpha <= 1.0 ? Divergence::divergent : Divergence::convergent;
    case SeqRule::constant:
      return Divergence::divergent;
    case SeqRule::geometric:
      // Positive ratio: terms vanish only when q < 1.
      return q < 1.0 ? Divergence::convergent : Divergence::divergent;
    case SeqRule::explicit_list:
    case SeqRule::custom:
      return Divergence::unknown;
  }
  return Divergence::unknown;
}

SeqSpec::InfClass SeqSpec::infimum_class() const {
  switch (rule) {
    case SeqRule::harmonic:
      return InfClass::zero;
    case SeqRule::powerlaw:
      return alpha > 0.0 ? InfClass::zero : InfClass::positive;
    case SeqRule::constant:
      return InfClass::positive;
    case SeqRule::geometric:
      return q < 1.0 ? InfClass::zero : InfClass::positive;
    case SeqRule::explicit_list:
    case SeqRule::custom:
      return InfClass::unknown;
  }
  return InfClass::unknown;
}

std::string SeqSpec::describe() const {
  switch (rule) {
    case SeqRule::harmonic:
      return "harmonic";
    case SeqRule::powerlaw:
      return "powerlaw:" + std::to_string(alpha);
    case SeqRule::constant:
      return "constant:" + std::to_string(value);
    case SeqRule::geometric:
      return "geometric:" + std::to_string(q);
    case SeqRule::explicit_list:
      return "explicit[" + std::to_string(terms.size()) + "]";
    case SeqRule::custom:
      return "custom:" + expr_text;
  }
  return "?";
}

SeriesBuffer materialize(const SeqSpec& seq, std::uint64_t N) {
  if (N == 0) throw usage_error("N must be at least 1");
  if (seq.rule == SeqRule::explicit_list && N > seq.terms.size()) {
    throw usage_error("N exceeds the explicit sequence length");
  }
  SeriesBuffer buf;
  buf.terms.resize(N);
  buf.partial_sums.resize(N);
  KahanSum sum;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double t = seq.term(n);
    buf.terms[n - 1] = t;
    sum.add(t);
    buf.partial_sums[n - 1] = sum.value();
  }
  return buf;
}

}  // namespace hardylab
