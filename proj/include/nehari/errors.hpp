#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid argument values (non-positive arguments, bad exponents, ...).
struct DomainError : Error {
  using Error::Error;
};

/// The sufficient condition p*b_i > 2*sum_j d_ij*beta_ij fails for some i,
/// so no bracket [r,R] confining the inner maximum can be produced.
struct Infeasible : Error {
  using Error::Error;
};

/// Exhaustive grid search would exceed the configured evaluation budget.
struct CostGuard : Error {
  using Error::Error;
};

/// A system coefficient violates its sign or symmetry constraint.
struct SignError : Error {
  using Error::Error;
};

/// kappa_i <= -lambda_1 of the domain: the quadratic form is not a norm.
struct CoercivityViolation : Error {
  using Error::Error;
};

/// A tuple component is (numerically) zero where a nontrivial one is required.
struct TrivialComponent : Error {
  using Error::Error;
};

/// The inner problem of a tuple has no interior critical point: u is not in
/// the projectable set U.
struct NotInU : Error {
  using Error::Error;
};

/// Requested number of disjoint supports does not fit on the current grid.
struct ResolutionTooCoarse : Error {
  using Error::Error;
};

/// Exponent pattern not admissible for the given dimension (critical preset).
struct DimensionRule : Error {
  using Error::Error;
};

/// Descent started from a point outside U.
struct InvalidStart : Error {
  using Error::Error;
};

}  // namespace nehari
