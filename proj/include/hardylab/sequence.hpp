#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardylab/expr.hpp"

namespace hardylab {

enum class SeqRule {
  harmonic,       // a_n = 1/n
  powerlaw,       // a_n = n^(-alpha)
  constant,       // a_n = value
  geometric,      // a_n = q^n
  explicit_list,  // finite list of terms
  custom,         // expression in the index, written in x
};

/// Rule-based description of a positive sequence. The rule is kept symbolic
/// so analyses can use exact knowledge (divergence of the sum, behaviour of
/// the infimum) instead of guessing from a finite prefix.
struct SeqSpec {
  SeqRule rule = SeqRule::harmonic;
  double alpha = 1.0;               // powerlaw
  double value = 1.0;               // constant
  double q = 0.5;                   // geometric
  std::vector<double> terms;        // explicit_list
  std::string expr_text;            // custom
  expr::ExprHandle expression;      // custom, parsed

  static SeqSpec harmonic();
  static SeqSpec powerlaw(double alpha);
  static SeqSpec constant(double value);
  static SeqSpec geometric(double q);
  static SeqSpec explicit_list(std::vector<double> terms);
  static SeqSpec custom(const std::string& expr_in_x);

  /// n is 1-based. Throws when the term is nonpositive or non-finite.
  double term(std::uint64_t n) const;

  enum class Divergence { divergent, convergent, unknown };

  /// Whether the series sum a_n diverges, decided from the rule where the
  /// answer is analytic. explicit_list and custom return unknown; callers
  /// fall back to a prefix heuristic and must flag it.
  Divergence sum_divergence() const;

  enum class InfClass { zero, positive, unknown };

  /// Whether inf_n a_n is zero or positive, again from the rule.
  InfClass infimum_class() const;

  std::string describe() const;
};

/// Materialized prefix of a series: terms and compensated partial sums,
/// both indexed so that position i corresponds to n = i + 1.
struct SeriesBuffer {
  std::vector<double> terms;
  std::vector<double> partial_sums;
  std::uint64_t size() const { return terms.size(); }
};

/// Evaluate the first N terms. Throws numerical_fault if a term underflows
/// to zero, is negative, or is not finite; every analysis downstream assumes
/// strictly positive terms.
SeriesBuffer materialize(const SeqSpec& seq, std::uint64_t N);

}  // namespace hardylab
