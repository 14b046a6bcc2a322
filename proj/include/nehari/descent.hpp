#pragma once

#include <cstdint>
#include <vector>

#include "nehari/energy.hpp"

namespace nehari {

struct ArmijoParams {
  double c1 = 1e-4;
  double shrink = 0.5;
  double t0 = 1.0;
};

struct DescentConfig {
  double tol_grad = 1e-6;
  int max_iter = 2000;
  ArmijoParams armijo;
  double s_cap = 1e3;
  std::uint64_t rng_seed = 0;
  double dedup_tol = 1e-4;
  int threads = 1;
};

enum class SolveStatus : std::uint8_t {
  Converged,
  BoundaryEscape,
  IterLimit,
};

struct SolveReport {
  SolveStatus status = SolveStatus::IterLimit;
  NehariPoint solution;
  FunctionTuple torus_point;  // normalized solution, the Psi argument
  double psi_value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool positive = false;  // all components sign-definite
  VectorXd component_norms;  // ||s_i u_i||_i = s_i
  int seed_index = 0;
};

/// Componentwise (u_i + t v_i)/||u_i + t v_i||_i back onto the torus.
FunctionTuple retract(const EnergyModel& model, const FunctionTuple& u,
                      const FunctionTuple& v, double t);

/// Armijo-backtracked Riemannian steepest descent of Psi on U.
/// Throws InvalidStart when u0 is not in U.
SolveReport minimize_psi(const EnergyModel& model, const FunctionTuple& u0,
                         const DescentConfig& cfg);

/// k seed tuples built from k*M bump functions with pairwise disjoint
/// supports, each component normalized in its ||.||_i norm. When
/// `with_mixture` is set and k >= 2, the last seed is a signed two-vertex
/// simplex mixture (sign-changing components, still disjoint across i).
std::vector<FunctionTuple> genus_seeds(const EnergyModel& model, int k,
                                       std::uint64_t rng_seed = 0,
                                       bool with_mixture = false);

/// Runs minimize_psi from the given seeds, deduplicates converged solutions,
/// sorts them by energy, and re-solves the least one from |u| to produce a
/// positive candidate.
std::vector<SolveReport> multistart(const EnergyModel& model,
                                    const std::vector<FunctionTuple>& seeds,
                                    const DescentConfig& cfg);

/// Convenience overload: seeds from genus_seeds(model, k) (with a signed
/// mixture seed when k >= 3).
std::vector<SolveReport> multistart(const EnergyModel& model, int k,
                                    const DescentConfig& cfg);

}  // namespace nehari
