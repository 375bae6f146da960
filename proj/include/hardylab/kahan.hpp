#pragma once

#include <cmath>

namespace hardylab {

/// Compensated accumulator (Kahan-Babuska / Neumaier variant).
///
/// Keeps a running sum plus a correction term so that long series of small
/// terms do not lose mass to rounding. The pair (sum, comp) represents the
/// accumulated value to roughly twice working precision, which matters when
/// 10^6 harmonic-scale terms feed a threshold test.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  /// Multiply the accumulated value by f. Used when a running scale factor
  /// changes (log-sum-exp rescaling).
  void scale(double f) noexcept {
    sum_ *= f;
    comp_ *= f;
  }

  void reset() noexcept {
    sum_ = 0.0;
    comp_ = 0.0;
  }

  double value() const noexcept { return sum_ + comp_; }

  /// Signed excess of the accumulated value over a threshold, evaluated as
  /// (sum - threshold) + comp. For thresholds within a factor of two of the
  /// sum the subtraction is exact (Sterbenz), so comparisons against e.g. 1.0
  /// do not suffer the double rounding that value() >= threshold would.
  double excess_over(double threshold) const noexcept {
    return (sum_ - threshold) + comp_;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace hardylab
