#pragma once

#include <stdexcept>
#include <string>

namespace coarse {

// Exception hierarchy. The CLI maps each leaf onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (exit code 2).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A checked invariant failed on computed data (exit code 1).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The mathematics has no answer at this scale: a coefficient has no
/// directional limit, a filter horizon left the window, and so on (exit code 3).
class Obstruction : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public InvariantViolation {
 public:
  ConvergenceError(const std::string& what, double residual)
      : InvariantViolation(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace coarse
