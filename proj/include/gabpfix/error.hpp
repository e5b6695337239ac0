#ifndef GABPFIX_ERROR_HPP
#define GABPFIX_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gabpfix {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// J_ii <= 0: the input cannot be a positive-definite information matrix.
class NonPositiveDiagonal : public Error {
 public:
  explicit NonPositiveDiagonal(std::size_t index)
      : Error("non-positive diagonal entry at index " + std::to_string(index)),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double last_estimate)
      : Error(what), last_estimate_(last_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

/// A GaBP precision aggregate fell below the pivot floor.
class NumericalBreakdown : public Error {
 public:
  NumericalBreakdown(std::size_t node, std::size_t neighbor)
      : Error("numerical breakdown at edge " + std::to_string(node) + "->" +
              std::to_string(neighbor)),
        node_(node),
        neighbor_(neighbor) {}
  explicit NumericalBreakdown(std::size_t node)
      : Error("numerical breakdown at node " + std::to_string(node)),
        node_(node),
        neighbor_(node) {}

  std::size_t node() const noexcept { return node_; }
  std::size_t neighbor() const noexcept { return neighbor_; }

 private:
  std::size_t node_;
  std::size_t neighbor_;
};

class DimensionTooLarge : public Error {
 public:
  DimensionTooLarge(std::size_t n, std::size_t cap)
      : Error("dimension " + std::to_string(n) + " exceeds dense cap " +
              std::to_string(cap)) {}
};

class NotWalkSummableAfterLoading : public Error {
 public:
  explicit NotWalkSummableAfterLoading(double rho)
      : Error("loaded model is not walk-summable (rho(|R'|) = " +
              std::to_string(rho) + ")"),
        rho_(rho) {}

  double rho() const noexcept { return rho_; }

 private:
  double rho_;
};

/// Malformed input file; carries the offending line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gabpfix

#endif  // GABPFIX_ERROR_HPP
