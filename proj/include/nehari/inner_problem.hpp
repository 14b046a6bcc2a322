#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "nehari/errors.hpp"

namespace nehari {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Coefficients of the M-variable function
///   J(s) = sum_i a_i s_i^2 - sum_i b_i s_i^p
///          + sum_{i != j} d_ij s_j^{alpha_ij} s_i^{beta_ij}.
/// The diagonal of d, alpha, beta is ignored (kept zero).
struct CouplingData {
  int M = 0;
  double p = 0.0;
  VectorXd a;
  VectorXd b;
  MatrixXd d;
  MatrixXd alpha;
  MatrixXd beta;

  /// Throws DomainError if any structural invariant fails:
  /// a_i, b_i > 0; d symmetric nonnegative; alpha_ij, beta_ij > 1;
  /// alpha_ij + beta_ij = p; alpha_ij = beta_ji.
  void validate() const;

  /// True when p*b_i > 2*sum_{j != i} d_ij*beta_ij for every i
  /// (the hypothesis under which the maximum is confined to a box).
  bool feasible() const;
};

/// Box [r,R]^M known to contain every interior critical point of J.
struct Bracket {
  double r = 0.0;
  double R = 0.0;
};

enum class MaximizeStatus : std::uint8_t {
  Converged,
  NoInteriorCriticalPoint,
  IterationLimit,
};

struct CriticalPoint {
  VectorXd s;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  MaximizeStatus status = MaximizeStatus::IterationLimit;
};

double eval_J(const CouplingData& c, const VectorXd& s);
VectorXd grad_J(const CouplingData& c, const VectorXd& s);
MatrixXd hess_J(const CouplingData& c, const VectorXd& s);

/// Endpoints r = (1-eta) min_i (2a_i/(p b_i))^{1/(p-2)} and
/// R = (1+eta) max_i (2a_i/(p b_i - 2 sum_j d_ij beta_ij))^{1/(p-2)},
/// eta = 1e-3. Throws Infeasible when feasible() is false.
Bracket bracket(const CouplingData& c);

/// Finds the unique interior critical point of J (projected Newton on the
/// bracket box, gradient-ascent fallback). `tol` is relative to the gradient
/// scale 1 + max_i 2 a_i s_i. For infeasible data an unclamped ascent is
/// attempted anyway; escape to the boundary of (0,inf)^M is reported as
/// NoInteriorCriticalPoint.
CriticalPoint maximize(const CouplingData& c, double tol = 1e-10,
                       int max_iter = 200);

/// Exhaustive search over a log-spaced n^M lattice on [lo,hi]^M.
/// Verification oracle only; throws CostGuard when n^M > budget.
VectorXd brute_force_max(const CouplingData& c, double lo, double hi, int n,
                         std::int64_t budget = 200'000'000);

}  // namespace nehari
