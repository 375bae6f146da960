#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hardylab/expr.hpp"
#include "hardylab/kahan.hpp"
#include "hardylab/sequence.hpp"

namespace hardylab {

enum class MeanFamily {
  arithmetic,
  geometric,
  harmonic,
  power,
  min,
  max,
  quasiarithmetic,
};

/// Description of a mean. Construct through the factories; the
/// quasiarithmetic factory parses the generator and verifies strict
/// monotonicity on the working domain [0.1, 10] by sampling at 64 points.
struct MeanSpec {
  MeanFamily family = MeanFamily::arithmetic;
  double p = 0.0;                   // power exponent
  std::string generator_text;       // quasiarithmetic
  expr::ExprHandle generator;       // quasiarithmetic, parsed

  static MeanSpec arithmetic();
  static MeanSpec geometric();
  static MeanSpec harmonic();
  static MeanSpec power(double p);
  static MeanSpec min();
  static MeanSpec max();
  static MeanSpec quasiarithmetic(const std::string& generator_in_x);

  std::string describe() const;
};

/// Streaming evaluator: push terms one at a time, read the mean of everything
/// pushed so far in O(1) (amortized) per step. Geometric and power means work
/// in the log domain with a running rescale, so million-term prefixes of
/// harmonic-scale data do not underflow.
class MeanAccumulator {
 public:
  explicit MeanAccumulator(const MeanSpec& spec);

  /// x must be strictly positive and finite.
  void push(double x);

  /// Mean of the terms pushed so far, clamped into [min, max] of the data so
  /// the mean-value property holds exactly. Requires count() >= 1.
  double value() const;

  std::uint64_t count() const { return count_; }
  double min_term() const { return min_; }
  double max_term() const { return max_; }

 private:
  double invert_generator(double y) const;
  void ensure_generator_monotone() const;

  MeanSpec spec_;
  std::uint64_t count_ = 0;
  double min_ = 0.0;
  double max_ = 0.0;
  KahanSum plain_;       // arithmetic: sum x; harmonic: sum 1/x;
                         // geometric: sum log x; quasiarithmetic: sum f(x)
  double running_ = 0.0; // min/max families
  // power family, p != 0: log-sum-exp state over t_i = p*log(x_i)
  double peak_t_ = 0.0;
  KahanSum scaled_;
  // quasiarithmetic: closed-form inverse kind and cached monotone range
  enum class Inverse { none, identity, exp_of, log_of, root };
  Inverse inverse_ = Inverse::none;
  double inverse_p_ = 0.0;
  mutable double checked_lo_ = 0.0;
  mutable double checked_hi_ = 0.0;
};

/// Mean of a whole vector. Validates the input (nonempty, strictly positive,
/// finite entries) and streams it through a MeanAccumulator.
double eval_mean(const MeanSpec& spec, std::span<const double> v);

/// Means of all prefixes: result[i] = mean of terms[0..i].
std::vector<double> prefix_means(const MeanSpec& spec,
                                 std::span<const double> terms);

/// Convenience overload: materializes the first N terms of the sequence.
std::vector<double> prefix_means(const MeanSpec& spec, const SeqSpec& seq,
                                 std::uint64_t N);

}  // namespace hardylab
