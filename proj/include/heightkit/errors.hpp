#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heightkit {

/// Malformed or out-of-domain input (bad polynomial text, non-prime p, zero polynomial...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Polynomial text could not be parsed; `position()` is a 0-based byte offset into the input.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : DomainError(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An iterative numerical method failed to reach its target within its budget.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heightkit
