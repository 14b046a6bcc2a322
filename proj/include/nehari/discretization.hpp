#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <utility>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

using Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double>;

enum class DomainKind {
  Ball,            // radial functions on the ball of radius `radius`
  ExteriorRadial,  // radial functions on {hole_radius < |x| < truncation}
  SphereAngular,   // O(m) x O(n)-invariant functions on S^N, coordinate
                   // theta in (0, pi/2), m + n = N + 1
};

struct DomainSpec {
  DomainKind kind = DomainKind::Ball;
  int dim = 3;  // ambient dimension N
  double radius = 1.0;
  double hole_radius = 0.0;
  double truncation = 0.0;
  int m = 0;
  int n_factor = 0;

  void validate() const;
};

/// 1D symmetry-reduced discrete function space: nodes of the reduced
/// coordinate, quadrature weights carrying the measure density, Dirichlet
/// mask, and the assembled stiffness/mass pair. Immutable after build.
class Space {
 public:
  DomainSpec domain;
  VectorXd nodes;
  VectorXd quad;  // trapezoidal weights times measure density
  std::vector<bool> dirichlet;
  SparseMat stiffness;  // int w u' v'  (weighted, natural)
  SparseMat mass;       // lumped: diag(quad)

  int size() const { return static_cast<int>(nodes.size()); }

  double integrate(const VectorXd& f) const { return quad.dot(f); }

  /// Zeroes the Dirichlet-masked entries of v in place.
  void apply_mask(VectorXd& v) const;

  /// Lowest eigenvalue of the Dirichlet pencil K x = lambda M x
  /// (shifted inverse iteration). Cached after the first call.
  double lambda1() const;

  /// Solves (stiffness + kappa*mass) x = rhs on the masked subspace.
  VectorXd solve(double kappa, const VectorXd& rhs) const;

 private:
  mutable double lambda1_ = -1.0;
  mutable std::vector<std::pair<double, std::shared_ptr<void>>> solvers_;
  friend std::shared_ptr<const Space> build_space(const DomainSpec&, int);
};

using SpacePtr = std::shared_ptr<const Space>;

struct DiscreteFunction {
  VectorXd values;
  SpacePtr space;
};

SpacePtr build_space(const DomainSpec& dom, int n);

/// u'v' + kappa*uv form: returns u^T (K + kappa*M) v. Throws
/// CoercivityViolation when kappa <= -lambda1 + margin.
double inner_product_i(const Space& sp, double kappa, const VectorXd& u,
                       const VectorXd& v);

/// Integral of prod_f |u_f|^{e_f} with the space quadrature.
double integrate_power(
    const Space& sp,
    const std::vector<std::pair<const VectorXd*, double>>& factors);

/// Radial Aubin-Talenti bubble with quintic smooth-step cutoff:
/// w_eps(r) = chi(r) mu^{(2-N)/4} a_N (eps/(eps^2+r^2))^{(N-2)/2},
/// chi == 1 on [0, cutoff/2], chi == 0 beyond cutoff.
DiscreteFunction bubble(const SpacePtr& sp, double eps, double mu,
                        double cutoff_radius);

/// Surface area of the unit sphere S^{N-1} in R^N.
double unit_sphere_area(int N);

}  // namespace nehari
