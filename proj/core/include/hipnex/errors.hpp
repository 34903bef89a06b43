#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hipnex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector did not have the dimension of the problem it was used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter (or parameter override) is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An inner solver could not produce an approximate subproblem solution.
/// Carries the best iterate found so callers can inspect or reuse it.
class SubproblemError : public Error {
 public:
  SubproblemError(const std::string& what, Eigen::VectorXd best_iterate, double best_residual)
      : Error(what), best_iterate_(std::move(best_iterate)), best_residual_(best_residual) {}

  const Eigen::VectorXd& best_iterate() const { return best_iterate_; }
  double best_residual() const { return best_residual_; }

 private:
  Eigen::VectorXd best_iterate_;
  double best_residual_;
};

/// A proven invariant was breached beyond its slack (strict mode).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// An HPE oracle returned a step that violates the relative-error or
/// large-step condition.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace hipnex
