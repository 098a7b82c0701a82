#pragma once

#include <stdexcept>
#include <string>

namespace madesign {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive definite is not.
class NotPD : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive semidefinite has a significantly
/// negative eigenvalue.
class NotPSD : public Error {
 public:
  using Error::Error;
};

/// A scalar function was evaluated outside its domain (e.g. a nonpositive
/// eigenvalue fed to a function defined on (0, inf)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The eigen-solver failed to converge.
class EigenSolverFailure : public Error {
 public:
  using Error::Error;
};

/// The design objective is not differentiable at the requested point
/// (moment matrix not positive definite).
class NonDifferentiablePoint : public Error {
 public:
  using Error::Error;
};

/// A multiplicative step saw a negative gradient coordinate on the support.
class NegativeGradient : public Error {
 public:
  using Error::Error;
};

/// Every candidate weight vanished in a multiplicative step.
class DegenerateStep : public Error {
 public:
  using Error::Error;
};

/// The starting point violates the solver's preconditions.
class StartPointError : public Error {
 public:
  using Error::Error;
};

/// The moment matrix left the feasibility cone of the generalized problem.
class InfeasibleMoment : public Error {
 public:
  using Error::Error;
};

/// A problem or trace file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace madesign
