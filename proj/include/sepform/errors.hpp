#pragma once

#include <stdexcept>
#include <string>

namespace sepform {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or contract-violating input (bad shapes, non-Hermitian data,
/// duplicate ensemble entries, grids too coarse for the field).
class InputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

/// A numerical check did not meet its tolerance.
class ToleranceError : public Error {
 public:
  using Error::Error;
};

/// An iterative method stopped without converging.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Newton/continuation failure of the representation solver.
class SolverError : public ConvergenceError {
 public:
  enum class Reason { LeftPositiveOrthant, MaxIterations, SingularJacobian, Stagnated };
  SolverError(Reason reason, const std::string& what) : ConvergenceError(what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

}  // namespace sepform
