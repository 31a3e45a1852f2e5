#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avoid {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid shapes, malformed parameters, violated invariants.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Rejected text input; carries the 1-based line number.
class ParseError : public ParameterError {
 public:
  ParseError(size_t line, const std::string& what)
      : ParameterError("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Instance shape not admissible for a solver (stretch or locality).
class StretchError : public Error {
 public:
  using Error::Error;
};

// Enumeration or branch budget exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace avoid
