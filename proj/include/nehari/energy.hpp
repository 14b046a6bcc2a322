#pragma once

#include <string>
#include <vector>

#include "nehari/discretization.hpp"
#include "nehari/inner_problem.hpp"

namespace nehari {

/// PDE-level data of the coupled system.
struct SystemSpec {
  int M = 0;
  int N = 3;        // ambient dimension
  double p = 0.0;   // common exponent, in (2, 2*]
  VectorXd kappa;
  VectorXd mu;
  MatrixXd lambda;  // zero diagonal, symmetric, negative off-diagonal
  MatrixXd alpha;
  MatrixXd beta;
  DomainSpec domain;

  double critical_exponent() const { return 2.0 * N / (N - 2.0); }
};

/// All invariant violations of `spec` (empty means valid). The coercivity
/// check uses the lowest Dirichlet eigenvalue of `sp`.
std::vector<std::string> spec_diagnostics(const SystemSpec& spec,
                                          const Space& sp);

/// Throws a typed error (SignError, CoercivityViolation, DomainError) for
/// the first violated invariant.
void validate_spec(const SystemSpec& spec, const Space& sp);

/// M-tuple of nodal functions on a shared space.
struct FunctionTuple {
  std::vector<VectorXd> comp;
  SpacePtr space;

  int M() const { return static_cast<int>(comp.size()); }
};

struct NehariPoint {
  VectorXd s;            // inner maximizer s_u
  FunctionTuple tuple;   // s_u * u
  double energy = 0.0;
  VectorXd residuals;    // d_i J(m(u))[m(u)_i]
};

/// Assembles the functional J of the system on a fixed space and exposes
/// the Nehari projection and the reduced functional Psi. All methods are
/// const and safe to call concurrently.
class EnergyModel {
 public:
  EnergyModel(SystemSpec spec, SpacePtr space);

  const SystemSpec& spec() const { return spec_; }
  const SpacePtr& space() const { return space_; }

  double inner(int i, const VectorXd& u, const VectorXd& v) const;
  double norm_i(int i, const VectorXd& u) const;

  /// a_{u,i} = 1/2 ||u_i||_i^2, b_{u,i} = (1/p) int mu_i |u_i|^p,
  /// d_{u,ij} = -1/2 int lambda_ij |u_j|^alpha |u_i|^beta.
  CouplingData coeffs_of(const FunctionTuple& u) const;

  double energy(const FunctionTuple& u) const;

  /// Riesz representatives g_i of d_i J(u) in the <.,.>_i products.
  FunctionTuple energy_gradient(const FunctionTuple& u) const;

  /// Dual (nodal) residual vector of component i; <g_i, v>_i = r_i . v.
  VectorXd residual_vector(const FunctionTuple& u, int i) const;

  VectorXd nehari_residuals(const FunctionTuple& u) const;

  /// Projection onto the Nehari set via the inner maximization.
  /// Throws TrivialComponent or NotInU.
  NehariPoint project_nehari(const FunctionTuple& u) const;

  /// Componentwise division by the ||.||_i norms (the inverse of m).
  FunctionTuple normalize_to_torus(const FunctionTuple& u) const;

  double psi(const FunctionTuple& u_on_torus) const;
  double psi(const NehariPoint& np) const;

  /// Tangential Riesz gradient of Psi at u (component i orthogonal to u_i).
  FunctionTuple psi_gradient(const FunctionTuple& u_on_torus) const;
  FunctionTuple psi_gradient(const FunctionTuple& u_on_torus,
                             const NehariPoint& np) const;

  /// Norm of a tangent tuple in the product metric, sqrt(sum <v_i,v_i>_i).
  double tangent_norm(const FunctionTuple& v) const;

 private:
  SystemSpec spec_;
  SpacePtr space_;
};

}  // namespace nehari
