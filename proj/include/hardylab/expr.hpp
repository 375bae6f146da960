#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace hardylab::expr {

enum class NodeKind {
  literal,
  variable,
  negate,
  add,
  sub,
  mul,
  div,
  pow,
  log_fn,
  exp_fn,
};

/// Immutable expression node. Handles are shared freely across threads once
/// built; nothing here mutates after parsing.
struct Node {
  NodeKind kind{};
  double value = 0.0;  // literal payload
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;  // unary ops use lhs only
  std::uint32_t offset = 0;         // byte offset in the source text
};

using ExprHandle = std::shared_ptr<const Node>;

/// Parse an expression in one variable `x`.
///
/// Precedence, loosest to tightest: + -, * /, unary -, ^ (right
/// associative). Functions: log, exp. Throws parse_error with the byte
/// offset of the first offending character.
ExprHandle parse_generator(std::string_view text);

/// Evaluate at x. IEEE-faithful: overflow yields an infinity; genuine domain
/// violations (log of a nonpositive value, division by zero, fractional
/// power of a negative base, any NaN) throw eval_domain_error carrying the
/// offending node's offset.
double eval_expr(const Node& e, double x);

/// Canonical rendering with minimal parentheses. print is a left inverse of
/// parse up to formatting, and parse(print(e)) reprints to the same string.
std::string print_expr(const Node& e);

/// Structural equality (same shape, same literal bits). Offsets ignored.
bool same_structure(const Node& a, const Node& b);

/// Sampled monotonicity direction on [lo, hi]: +1 strictly increasing,
/// -1 strictly decreasing, 0 not strictly monotone at the sampled points.
/// Checked at 64 points, log-spaced when lo > 0, else linear.
int sampled_monotone_direction(const Node& e, double lo, double hi);

/// Solve e(x) = y on [lo, hi] by bisection for a sampled-monotone e.
/// Stops when |e(x) - y| <= 1e-13 * max(1, |y|), within 200 iterations.
/// Throws usage_error when e is not monotone on [lo, hi] or y is outside
/// [e(lo), e(hi)]; numerical_fault when bisection fails to converge.
double invert_monotone(const Node& e, double y, double lo, double hi);

}  // namespace hardylab::expr
