#include "hardylab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab::expr {

namespace {

ExprHandle make(NodeKind k, std::uint32_t off, ExprHandle l = nullptr,
                ExprHandle r = nullptr, double v = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = v;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->offset = off;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprHandle run() {
    skip_ws();
    ExprHandle e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) {
      throw parse_error("unexpected trailing input", pos_);
    }
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }

  char peek() const { return text_[pos_]; }

  bool consume(char c) {
    skip_ws();
    if (!at_end() && peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprHandle parse_sum() {
    ExprHandle e = parse_product();
    for (;;) {
      skip_ws();
      if (at_end()) return e;
      const char c = peek();
      if (c != '+' && c != '-') return e;
      const auto off = static_cast<std::uint32_t>(pos_);
      ++pos_;
      ExprHandle rhs = parse_product();
      e = make(c == '+' ? NodeKind::add : NodeKind::sub, off, e, rhs);
    }
  }

  ExprHandle parse_product() {
    ExprHandle e = parse_unary();
    for (;;) {
      skip_ws();
      if (at_end()) return e;
      const char c = peek();
      if (c != '*' && c != '/') return e;
      const auto off = static_cast<std::uint32_t>(pos_);
      ++pos_;
      ExprHandle rhs = parse_unary();
      e = make(c == '*' ? NodeKind::mul : NodeKind::div, off, e, rhs);
    }
  }

  ExprHandle parse_unary() {
    skip_ws();
    if (!at_end() && peek() == '-') {
      const auto off = static_cast<std::uint32_t>(pos_);
      ++pos_;
      return make(NodeKind::negate, off, parse_unary());
    }
    return parse_power();
  }

  ExprHandle parse_power() {
    ExprHandle base = parse_atom();
    skip_ws();
    if (!at_end() && peek() == '^') {
      const auto off = static_cast<std::uint32_t>(pos_);
      ++pos_;
      // Right associative; the exponent may itself carry a unary minus.
      ExprHandle exponent = parse_unary();
      return make(NodeKind::pow, off, base, exponent);
    }
    return base;
  }

  ExprHandle parse_atom() {
    skip_ws();
    if (at_end()) throw parse_error("expected expression", pos_);
    const char c = peek();
    if (c == '(') {
      ++pos_;
      ExprHandle e = parse_sum();
      skip_ws();
      if (!consume(')')) throw parse_error("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_name();
    }
    throw parse_error("expected expression", pos_);
  }

  ExprHandle parse_number() {
    const auto off = static_cast<std::uint32_t>(pos_);
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    // strtod accepts the usual decimal and exponent forms; the grammar never
    // hands it a leading sign because '-' is consumed as a unary operator.
    const double v = std::strtod(begin, &end);
    if (end == begin) throw parse_error("malformed number", pos_);
    if (!std::isfinite(v)) throw parse_error("literal out of range", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return make(NodeKind::literal, off, nullptr, nullptr, v);
  }

  ExprHandle parse_name() {
    const auto off = static_cast<std::uint32_t>(pos_);
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") {
      return make(NodeKind::variable, off);
    }
    if (name == "log" || name == "exp") {
      skip_ws();
      if (!consume('(')) throw parse_error("expected '(' after function", pos_);
      ExprHandle arg = parse_sum();
      skip_ws();
      if (!consume(')')) throw parse_error("expected ')'", pos_);
      return make(name == "log" ? NodeKind::log_fn : NodeKind::exp_fn, off,
                  arg);
    }
    throw parse_error("unknown identifier '" + std::string(name) + "'", start);
  }
};

[[noreturn]] void domain(const Node& n, const char* msg) {
  throw eval_domain_error(msg, n.offset);
}

// Precedence levels for the printer. Higher binds tighter.
int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::add:
    case NodeKind::sub:
      return 1;
    case NodeKind::mul:
    case NodeKind::div:
      return 2;
    case NodeKind::negate:
      return 3;
    case NodeKind::pow:
      return 4;
    default:
      return 5;  // atoms
  }
}

void format_literal(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

void print_rec(std::string& out, const Node& e, int parent_prec,
               bool right_side) {
  const int prec = precedence(e.kind);
  bool need_parens = prec < parent_prec;
  // Same precedence on the right of a left-associative operator, or on the
  // left of the right-associative '^', still needs parentheses.
  if (!need_parens && prec == parent_prec) {
    if (parent_prec == 1 || parent_prec == 2) need_parens = right_side;
    if (parent_prec == 4) need_parens = !right_side;
  }
  if (need_parens) out.push_back('(');
  switch (e.kind) {
    case NodeKind::literal:
      format_literal(out, e.value);
      break;
    case NodeKind::variable:
      out.push_back('x');
      break;
    case NodeKind::negate:
      out.push_back('-');
      print_rec(out, *e.lhs, 3, true);
      break;
    case NodeKind::add:
    case NodeKind::sub:
      print_rec(out, *e.lhs, 1, false);
      out.append(e.kind == NodeKind::add ? " + " : " - ");
      print_rec(out, *e.rhs, 1, true);
      break;
    case NodeKind::mul:
    case NodeKind::div:
      print_rec(out, *e.lhs, 2, false);
      out.push_back(e.kind == NodeKind::mul ? '*' : '/');
      print_rec(out, *e.rhs, 2, true);
      break;
    case NodeKind::pow:
      print_rec(out, *e.lhs, 4, false);
      out.push_back('^');
      print_rec(out, *e.rhs, 4, true);
      break;
    case NodeKind::log_fn:
    case NodeKind::exp_fn:
      out.append(e.kind == NodeKind::log_fn ? "log(" : "exp(");
      print_rec(out, *e.lhs, 0, false);
      out.push_back(')');
      break;
  }
  if (need_parens) out.push_back(')');
}

}  // namespace

ExprHandle parse_generator(std::string_view text) {
  return Parser(text).run();
}

double eval_expr(const Node& e, double x) {
  switch (e.kind) {
    case NodeKind::literal:
      return e.value;
    case NodeKind::variable:
      return x;
    case NodeKind::negate:
      return -eval_expr(*e.lhs, x);
    case NodeKind::add:
      return eval_expr(*e.lhs, x) + eval_expr(*e.rhs, x);
    case NodeKind::sub:
      return eval_expr(*e.lhs, x) - eval_expr(*e.rhs, x);
    case NodeKind::mul:
      return eval_expr(*e.lhs, x) * eval_expr(*e.rhs, x);
    case NodeKind::div: {
      const double d = eval_expr(*e.rhs, x);
      if (d == 0.0) domain(e, "division by zero");
      return eval_expr(*e.lhs, x) / d;
    }
    case NodeKind::pow: {
      const double b = eval_expr(*e.lhs, x);
      const double p = eval_expr(*e.rhs, x);
      if (b < 0.0 && p != std::nearbyint(p)) {
        domain(e, "fractional power of a negative base");
      }
      if (b == 0.0 && p < 0.0) domain(e, "zero raised to a negative power");
      const double r = std::pow(b, p);
      if (std::isnan(r)) domain(e, "power outside the real domain");
      return r;
    }
    case NodeKind::log_fn: {
      const double a = eval_expr(*e.lhs, x);
      if (a <= 0.0) domain(e, "log of a nonpositive value");
      return std::log(a);
    }
    case NodeKind::exp_fn:
      return std::exp(eval_expr(*e.lhs, x));
  }
  domain(e, "corrupt expression node");
}

std::string print_expr(const Node& e) {
  std::string out;
  print_rec(out, e, 0, false);
  return out;
}

bool same_structure(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == NodeKind::literal && a.value != b.value) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !same_structure(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_structure(*a.rhs, *b.rhs)) return false;
  return true;
}

namespace {

constexpr int kMonotoneSamples = 64;

double sample_point(double lo, double hi, int i, bool log_spaced) {
  const double t = static_cast<double>(i) / (kMonotoneSamples - 1);
  if (log_spaced) {
    return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  return lo + t * (hi - lo);
}

}  // namespace

int sampled_monotone_direction(const Node& e, double lo, double hi) {
  if (!(lo < hi)) throw usage_error("monotonicity range requires lo < hi");
  const bool log_spaced = lo > 0.0 && hi / lo > 1.0;
  double prev = eval_expr(e, lo);
  int dir = 0;
  for (int i = 1; i < kMonotoneSamples; ++i) {
    const double x = (i == kMonotoneSamples - 1)
                         ? hi
                         : sample_point(lo, hi, i, log_spaced);
    const double y = eval_expr(e, x);
    int step;
    if (y > prev) {
      step = 1;
    } else if (y < prev) {
      step = -1;
    } else {
      return 0;  // flat pair: not strictly monotone at the sampled points
    }
    if (dir == 0) {
      dir = step;
    } else if (dir != step) {
      return 0;
    }
    prev = y;
  }
  return dir;
}

double invert_monotone(const Node& e, double y, double lo, double hi) {
  const int dir = sampled_monotone_direction(e, lo, hi);
  if (dir == 0) {
    throw usage_error(
        "expression is not strictly monotone on the requested range "
        "(checked at 64 points)");
  }
  double flo = eval_expr(e, lo);
  double fhi = eval_expr(e, hi);
  const double ymin = std::min(flo, fhi);
  const double ymax = std::max(flo, fhi);
  if (y < ymin || y > ymax) {
    throw usage_error("target value outside the range spanned on [lo, hi]");
  }
  const double tol = 1e-13 * std::max(1.0, std::fabs(y));
  double a = lo, b = hi;
  double best_x = a, best_err = std::fabs(flo - y);
  if (std::fabs(fhi - y) < best_err) {
    best_x = b;
    best_err = std::fabs(fhi - y);
  }
  for (int it = 0; it < 200 && best_err > tol; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = eval_expr(e, mid);
    const double err = std::fabs(fm - y);
    if (err < best_err) {
      best_err = err;
      best_x = mid;
    }
    // Keep the subinterval whose endpoint values bracket y.
    const bool go_left = (dir > 0) ? (fm > y) : (fm < y);
    if (go_left) {
      b = mid;
    } else {
      a = mid;
    }
    if (a == b) break;
  }
  if (best_err > tol) {
    throw numerical_fault("bisection failed to reach tolerance within 200 iterations");
  }
  return best_x;
}

}  // namespace hardylab::expr
