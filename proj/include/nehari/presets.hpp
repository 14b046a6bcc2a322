#pragma once

#include <map>
#include <set>

#include "nehari/descent.hpp"

namespace nehari {

struct Preset {
  SystemSpec spec;
  SpacePtr space;
};

/// Subcritical competitive system on a truncated exterior domain,
/// G = O(N) radial reduction. Requires p in (2, 2*), kappa_i > 0.
Preset preset_exterior(int N, double R0, double L, int n,
                       const SystemSpec& params);

/// Critical system on R^N, conformally transported to S^N via the
/// O(m) x O(n) invariance: one angular coordinate, kappa_i = N(N-2)/4,
/// p = 2*.
Preset preset_yamabe(int m, int n_dim, int grid_n, const VectorXd& mu,
                     const MatrixXd& lambda, const MatrixXd& alpha,
                     const MatrixXd& beta);

/// Critical system on the unit-type ball with kappa_i in (-lambda_1, 0).
/// Enforces the dimension rule: N = 4 needs alpha = beta = 2; N = 5 needs
/// min{alpha, beta} >= 4/3.
Preset preset_brezis_nirenberg(int N, double radius, int n,
                               const VectorXd& kappa, const VectorXd& mu,
                               const MatrixXd& lambda, const MatrixXd& alpha,
                               const MatrixXd& beta);

/// M = 1 specialization of the full pipeline: positive ground state of
/// -Delta u + kappa u = mu |u|^{p-2} u and its energy.
std::pair<DiscreteFunction, double> single_equation_ground_state(
    const SpacePtr& space, double kappa, double mu, double p,
    const DescentConfig& cfg);

/// Discrete Sobolev-type quotient inf ||w||_kappa^2 / (int mu |w|^p)^{2/p}
/// by normalized gradient descent. `start` seeds the descent; when empty a
/// default bump (or bubble, for critical p on a ball) is used.
double sobolev_constant(const SpacePtr& space, double kappa, double mu,
                        double p, const VectorXd& start = VectorXd(),
                        int max_iter = 400);

/// Energy of the M disjoint radial-shell Nehari tuple at shell width R.
/// Shell inner edges are fixed (independent of R) so the energies decrease
/// toward the per-shell quotient limits as R grows.
double separated_bump_energy(const Preset& exterior, double R,
                             const DescentConfig& cfg);

struct BubbleScan {
  std::vector<double> eps;
  std::vector<double> grad_norm2;   // ||w_eps||^2 (pure gradient)
  std::vector<double> crit_norm;    // |w_eps|_{2*}^{2*}
  std::vector<double> l2_norm2;     // |w_eps|_2^2
  std::map<double, std::vector<double>> beta_norms;  // |w_eps|_beta^beta

  double limit_grad_norm2 = 0.0;  // Aitken-extrapolated limit of ||w||^2
  double slope_defect = 0.0;      // fitted exponent of ||w||^2 - limit
  double slope_l2 = 0.0;          // fitted exponent of |w|_2^2
  double n4_residual_log = 0.0;   // N=4: residual of the eps^2|ln eps| fit
  double n4_residual_plain = 0.0; // N=4: residual of the plain eps^2 fit
  std::map<double, double> slope_beta;  // per beta; at 2*/2 the log factor
                                        // is modeled, not divided out
};

BubbleScan bubble_scan(const SpacePtr& ball_space, double mu,
                       double cutoff_radius, const std::vector<double>& eps,
                       const std::vector<double>& betas);

struct ThresholdReport {
  double c0 = 0.0;
  std::map<std::set<int>, double> cI;
  double S = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool conclusive = true;
};

/// Solves every proper sub-system for c_I, estimates the discrete Sobolev
/// constant, and checks the compactness threshold c0 < min_I (c_I + ...).
ThresholdReport bn_threshold_check(const Preset& bn, const DescentConfig& cfg);

}  // namespace nehari
