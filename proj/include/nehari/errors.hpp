#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Array lengths do not match the grid.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A profile that must be nonzero is numerically zero.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A component of the iterate collapsed to zero during a solve.
class CollapseError : public Error {
 public:
  CollapseError(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Sign pattern of a profile does not have exactly one interface.
class TopologyError : public Error {
 public:
  TopologyError(const std::string& what, int crossings)
      : Error(what), crossings_(crossings) {}
  int crossings() const noexcept { return crossings_; }

 private:
  int crossings_;
};

/// Scan bracket for a threshold search did not contain a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

}  // namespace nehari
