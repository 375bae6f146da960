#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hardylab {

/// Bad input from the caller: malformed flags, invalid vectors, unknown
/// families, out-of-range parameters. Maps to process exit code 2.
class usage_error : public std::runtime_error {
 public:
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error while parsing an expression. Carries the byte offset of the
/// first offending character.
class parse_error : public usage_error {
 public:
  parse_error(const std::string& what, std::size_t offset)
      : usage_error(what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation left the mathematical domain (log of a nonpositive value,
/// division by zero, fractional power of a negative base). Carries the byte
/// offset of the offending node in the original expression text.
class eval_domain_error : public std::runtime_error {
 public:
  eval_domain_error(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (node at offset " + std::to_string(offset) +
                           ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// An analysis could not complete for numerical reasons: a certificate
/// inequality failed, an accumulator produced a non-finite value, a bracketed
/// root search did not converge. Maps to process exit code 3.
class numerical_fault : public std::runtime_error {
 public:
  explicit numerical_fault(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace hardylab
