#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetsym {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Syntax error while parsing an expression or a system file.
/// `position` is a byte offset into the parsed text; `line` is 1-based and
/// only set when parsing multi-line input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what +
                             " (column " + std::to_string(position + 1) + ")"
                       : what + " (at position " + std::to_string(position) + ")"),
        position_(position),
        line_(line) {}

  std::size_t position() const { return position_; }
  int line() const { return line_; }

 private:
  std::size_t position_;
  int line_;
};

/// Structural error in expression algebra (e.g. division by a polynomial
/// that is identically zero).
class AlgebraError : public Error {
 public:
  using Error::Error;
};

/// Exact evaluation failed: unassigned symbol or division by zero at the point.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Invalid solved-form system or boundary data (circular principals,
/// unsolvable boundary condition, non-terminating rewrite).
class ReductionError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: instability, violated step bound, unsolvable
/// boundary value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Semantic error in a system-definition file, with a 1-based line number.
class SystemFileError : public Error {
 public:
  SystemFileError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace jetsym
