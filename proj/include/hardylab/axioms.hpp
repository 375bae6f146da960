#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/mean.hpp"

namespace hardylab {

/// Concrete inputs that exhibited the worst violation of an axiom, kept so a
/// failure can be replayed by hand.
struct AxiomWitness {
  std::string axiom;
  std::vector<double> x;
  std::vector<double> y;   // second operand (concavity), empty otherwise
  double scalar = 0.0;     // scale factor (homogeneity) or repetition count
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;  // relative
  std::uint64_t trial = 0;
};

struct AxiomResult {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;  // relative; 0 when every trial was clean
  std::uint64_t trials = 0;
  std::optional<AxiomWitness> witness;  // present on failure
};

struct PropertyReport {
  std::vector<AxiomResult> axioms;
  bool all_pass = true;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double tolerance = 0.0;

  const AxiomResult& find(const std::string& name) const;
};

struct DimRange {
  std::uint32_t lo = 1;
  std::uint32_t hi = 8;
};

/// Sampling check of the six mean axioms: mean-value bounds, symmetry,
/// homogeneity, coordinatewise monotonicity, repetition invariance, and
/// midpoint concavity. Violations are measured relative to the magnitude of
/// the compared values; an axiom fails when the worst violation exceeds tol.
/// Deterministic in (spec, trials, dims, seed). The concavity trials always
/// include the fixed probe x=(0.1, 1), y=(1, 0.1), which separates means
/// that average from means that pick extremes.
PropertyReport check_axioms(const MeanSpec& spec, std::uint64_t trials,
                            DimRange dims, std::uint64_t seed,
                            double tol = 1e-9);

}  // namespace hardylab
