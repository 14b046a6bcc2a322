#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nehari/presets.hpp"

using namespace nehari;

namespace {

SystemSpec exterior_params(double kappa = 1.0, double p = 4.0) {
  SystemSpec s;
  s.M = 2;
  s.N = 3;
  s.p = p;
  s.kappa = VectorXd::Constant(2, kappa);
  s.mu = VectorXd::Ones(2);
  s.lambda = MatrixXd::Zero(2, 2);
  s.lambda(0, 1) = s.lambda(1, 0) = -1.0;
  s.alpha = MatrixXd::Constant(2, 2, p / 2.0);
  s.beta = MatrixXd::Constant(2, 2, p / 2.0);
  return s;
}

MatrixXd neg_offdiag(int M, double v) {
  MatrixXd m = MatrixXd::Constant(M, M, v);
  m.diagonal().setZero();
  return m;
}

}  // namespace

TEST_CASE("preset_exterior validation") {
  CHECK_NOTHROW(preset_exterior(3, 1.0, 15.0, 300, exterior_params()));
  // critical p is rejected: this preset is subcritical by construction
  CHECK_THROWS_AS(preset_exterior(3, 1.0, 15.0, 300, exterior_params(1.0, 6.0)),
                  DomainError);
  CHECK_THROWS_AS(preset_exterior(3, 1.0, 15.0, 300, exterior_params(0.0)),
                  DomainError);
  CHECK_THROWS_AS(preset_exterior(3, 1.0, 15.0, 300, exterior_params(-1.0)),
                  DomainError);
}

TEST_CASE("preset_exterior: energy stable under truncation doubling") {
  DescentConfig cfg;
  const Preset a = preset_exterior(3, 1.0, 15.0, 400, exterior_params());
  const Preset b = preset_exterior(3, 1.0, 30.0, 800, exterior_params());
  EnergyModel ma(a.spec, a.space), mb(b.spec, b.space);
  const auto ra = multistart(ma, 1, cfg);
  const auto rb = multistart(mb, 1, cfg);
  REQUIRE(!ra.empty());
  REQUIRE(!rb.empty());
  CHECK(std::abs(ra.front().psi_value - rb.front().psi_value) <=
        1e-3 * (1.0 + std::abs(rb.front().psi_value)));
}

TEST_CASE("preset_yamabe parameters") {
  const VectorXd mu = VectorXd::Ones(2);
  const MatrixXd lam = neg_offdiag(2, -1.0);

  {
    // m = n = 2: N = 3, p = 2* = 6, kappa = N(N-2)/4 = 3/4
    const MatrixXd a = neg_offdiag(2, 3.0);
    const Preset pr = preset_yamabe(2, 2, 200, mu, lam, a, a);
    CHECK(pr.spec.N == 3);
    CHECK(pr.spec.p == doctest::Approx(6.0));
    CHECK(pr.spec.kappa[0] == doctest::Approx(0.75));
  }
  {
    // m = 2, n = 3: N = 4, p = 4, kappa = 2
    const MatrixXd a = neg_offdiag(2, 2.0);
    const Preset pr = preset_yamabe(2, 3, 200, mu, lam, a, a);
    CHECK(pr.spec.N == 4);
    CHECK(pr.spec.p == doctest::Approx(4.0));
    CHECK(pr.spec.kappa[0] == doctest::Approx(2.0));
  }
  {
    const MatrixXd a = neg_offdiag(2, 3.0);
    CHECK_THROWS_AS(preset_yamabe(1, 3, 200, mu, lam, a, a), DomainError);
  }
}

TEST_CASE("preset_brezis_nirenberg dimension rules") {
  const VectorXd mu = VectorXd::Ones(2);
  const MatrixXd lam = neg_offdiag(2, -0.5);
  const VectorXd kap = VectorXd::Constant(2, -1.0);

  const MatrixXd two = neg_offdiag(2, 2.0);
  CHECK_NOTHROW(preset_brezis_nirenberg(4, 1.0, 200, kap, mu, lam, two, two));

  // N = 4 with alpha != 2
  MatrixXd a = neg_offdiag(2, 2.5);
  MatrixXd b = neg_offdiag(2, 1.5);
  CHECK_THROWS_AS(preset_brezis_nirenberg(4, 1.0, 200, kap, mu, lam, a, b),
                  DimensionRule);

  // N = 5: p = 10/3, min{alpha, beta} >= 4/3
  a = neg_offdiag(2, 10.0 / 3.0 - 1.2);
  b = neg_offdiag(2, 1.2);
  CHECK_THROWS_AS(preset_brezis_nirenberg(5, 1.0, 200, kap, mu, lam, a, b),
                  DimensionRule);

  // N = 3 excluded entirely
  CHECK_THROWS_AS(preset_brezis_nirenberg(3, 1.0, 200, kap, mu, lam, two, two),
                  DomainError);

  // kappa must be negative but coercive
  CHECK_THROWS_AS(
      preset_brezis_nirenberg(4, 1.0, 200, VectorXd::Constant(2, 0.5), mu,
                              lam, two, two),
      DomainError);
  CHECK_THROWS_AS(
      preset_brezis_nirenberg(4, 1.0, 200, VectorXd::Constant(2, -60.0), mu,
                              lam, two, two),
      CoercivityViolation);
}

TEST_CASE("single_equation_ground_state is positive and on the Nehari set") {
  DomainSpec dom;
  dom.kind = DomainKind::Ball;
  dom.dim = 3;
  dom.radius = 1.0;
  const SpacePtr sp = build_space(dom, 500);
  DescentConfig cfg;
  const auto [u, energy] = single_equation_ground_state(sp, 1.0, 1.0, 4.0, cfg);
  CHECK(energy > 0.0);
  CHECK(u.values.minCoeff() >= 0.0);
  CHECK(u.values.maxCoeff() > 0.0);
  // Nehari identity: ||u||^2 = mu int |u|^p, energy = (1/2 - 1/p) ||u||^2
  const double nrm2 = inner_product_i(*sp, 1.0, u.values, u.values);
  const double pint = integrate_power(*sp, {{&u.values, 4.0}});
  CHECK(nrm2 == doctest::Approx(pint).epsilon(1e-6));
  CHECK(energy == doctest::Approx(0.25 * nrm2).epsilon(1e-6));
}

TEST_CASE("sobolev_constant: invariance, monotonicity, bubble consistency") {
  DomainSpec dom;
  dom.kind = DomainKind::Ball;
  dom.dim = 3;
  dom.radius = 1.0;
  const SpacePtr sp = build_space(dom, 800);

  // scale invariance of the quotient: seeding with 2w changes nothing
  VectorXd start = VectorXd::Zero(sp->size());
  for (int k = 0; k < sp->size(); ++k) {
    const double r = sp->nodes[k];
    start[k] = std::max(0.0, 1.0 - 2.0 * r);
  }
  sp->apply_mask(start);
  const double q1 = sobolev_constant(sp, 0.5, 1.0, 4.0, start);
  const double q2 = sobolev_constant(sp, 0.5, 1.0, 4.0, 2.0 * start);
  CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));

  // domain enlargement decreases the subcritical quotient
  DomainSpec big = dom;
  big.radius = 2.0;
  const SpacePtr sp2 = build_space(big, 1600);
  const double q_big = sobolev_constant(sp2, 0.5, 1.0, 4.0);
  CHECK(q_big < sobolev_constant(sp, 0.5, 1.0, 4.0));

  // N=4 critical: quotient within 2% of the bubble Rayleigh quotient
  DomainSpec b4;
  b4.kind = DomainKind::Ball;
  b4.dim = 4;
  b4.radius = 1.0;
  const SpacePtr sp4 = build_space(b4, 3000);
  const double S = sobolev_constant(sp4, 0.0, 1.0, 4.0);
  const VectorXd w = bubble(sp4, 1.0 / 20.0, 1.0, 1.0).values;
  const double quot = w.dot(sp4->stiffness * w) /
                      std::pow(integrate_power(*sp4, {{&w, 4.0}}), 0.5);
  CHECK(std::abs(S - quot) <= 0.02 * quot);
}

TEST_CASE("separated_bump_energy decreases in R and rejects oversized shells") {
  const Preset ex = preset_exterior(3, 1.0, 81.0, 1000, exterior_params(0.05));
  DescentConfig cfg;
  double prev = std::numeric_limits<double>::infinity();
  for (const double R : {4.0, 8.0, 16.0}) {
    const double e = separated_bump_energy(ex, R, cfg);
    CHECK(e < prev);
    prev = e;
  }
  CHECK_THROWS_AS(separated_bump_energy(ex, 60.0, cfg), ResolutionTooCoarse);
  CHECK_THROWS_AS(separated_bump_energy(ex, -1.0, cfg), ResolutionTooCoarse);
}

TEST_CASE("bubble_scan rejects malformed requests") {
  DomainSpec b5;
  b5.kind = DomainKind::Ball;
  b5.dim = 5;
  b5.radius = 1.0;
  const SpacePtr sp = build_space(b5, 2000);

  DomainSpec b3 = b5;
  b3.dim = 3;
  CHECK_THROWS_AS(bubble_scan(build_space(b3, 500), 1.0, 1.0, {0.1, 0.05, 0.02}, {}),
                  DomainError);
  // too few eps
  CHECK_THROWS_AS(bubble_scan(sp, 1.0, 1.0, {0.1, 0.05}, {}), DomainError);
  // not decreasing
  CHECK_THROWS_AS(bubble_scan(sp, 1.0, 1.0, {0.05, 0.1, 0.2}, {}), DomainError);
  // eps too large for the cutoff
  CHECK_THROWS_AS(bubble_scan(sp, 1.0, 1.0, {0.3, 0.2, 0.1}, {}), DomainError);
  // core underresolved at this grid
  CHECK_THROWS_AS(bubble_scan(sp, 1.0, 1.0, {0.1, 0.05, 0.001}, {}),
                  DomainError);
}

TEST_CASE("bn_threshold_check: sub-system consistency on a small grid") {
  const int M = 2;
  const VectorXd kap = VectorXd::Constant(M, -1.0);
  const VectorXd mu = VectorXd::Ones(M);
  const MatrixXd lam = neg_offdiag(M, -0.5);
  const MatrixXd two = neg_offdiag(M, 2.0);
  const Preset bn = preset_brezis_nirenberg(4, 1.0, 400, kap, mu, lam, two, two);
  DescentConfig cfg;
  const ThresholdReport rep = bn_threshold_check(bn, cfg);
  REQUIRE(rep.conclusive);
  CHECK(rep.cI.size() == 2);
  CHECK(rep.S > 0.0);
  CHECK(rep.c0 > 0.0);
  CHECK(rep.rhs > 0.0);

  // c_{I} for |keep| = 1 must equal the directly computed scalar energy
  const double c_single =
      single_equation_ground_state(bn.space, -1.0, 1.0, 4.0, cfg).second;
  for (const auto& [I, cI] : rep.cI) {
    CHECK(cI == doctest::Approx(c_single).epsilon(1e-8));
  }

  // more negative kappa does not increase c0
  const Preset bn2 = preset_brezis_nirenberg(
      4, 1.0, 400, VectorXd::Constant(M, -2.0), mu, lam, two, two);
  const ThresholdReport rep2 = bn_threshold_check(bn2, cfg);
  REQUIRE(rep2.conclusive);
  CHECK(rep2.c0 <= rep.c0 + 1e-10);
}
