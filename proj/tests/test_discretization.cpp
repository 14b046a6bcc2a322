#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nehari/discretization.hpp"

using namespace nehari;

namespace {

constexpr double kPi = std::numbers::pi;

DomainSpec unit_ball(int N = 3) {
  DomainSpec d;
  d.kind = DomainKind::Ball;
  d.dim = N;
  d.radius = 1.0;
  return d;
}

}  // namespace

TEST_CASE("DomainSpec validation") {
  DomainSpec d = unit_ball();
  d.dim = 2;
  CHECK_THROWS_AS(d.validate(), DomainError);

  d = unit_ball();
  d.radius = 0.0;
  CHECK_THROWS_AS(d.validate(), DomainError);

  d.kind = DomainKind::ExteriorRadial;
  d.dim = 3;
  d.hole_radius = 2.0;
  d.truncation = 1.5;
  CHECK_THROWS_AS(d.validate(), DomainError);

  d.kind = DomainKind::SphereAngular;
  d.m = 1;
  d.n_factor = 3;
  CHECK_THROWS_AS(d.validate(), DomainError);

  d.m = 2;
  d.n_factor = 3;  // m + n = 5 != dim + 1 = 4
  CHECK_THROWS_AS(d.validate(), DomainError);

  CHECK_THROWS_AS(build_space(unit_ball(), 8), DomainError);
}

TEST_CASE("ball quadrature reproduces the ball volume") {
  const SpacePtr sp = build_space(unit_ball(), 2000);
  const VectorXd one = VectorXd::Ones(sp->size());
  const double vol = sp->integrate(one);
  CHECK(std::abs(vol - 4.0 * kPi / 3.0) <= 1e-6 * (4.0 * kPi / 3.0));
}

TEST_CASE("lowest Dirichlet eigenvalue of the radial ball is pi^2") {
  const SpacePtr sp = build_space(unit_ball(), 2000);
  CHECK(std::abs(sp->lambda1() - kPi * kPi) <= 1e-4 * kPi * kPi);
}

TEST_CASE("sphere quadrature reproduces the sphere area") {
  DomainSpec d;
  d.kind = DomainKind::SphereAngular;
  d.dim = 3;
  d.m = 2;
  d.n_factor = 2;
  const SpacePtr sp = build_space(d, 2000);
  const VectorXd one = VectorXd::Ones(sp->size());
  // |S^3| = 2 pi^2
  CHECK(std::abs(sp->integrate(one) - 2.0 * kPi * kPi) <=
        1e-5 * 2.0 * kPi * kPi);
}

TEST_CASE("exterior grading clusters nodes near the hole") {
  DomainSpec d;
  d.kind = DomainKind::ExteriorRadial;
  d.dim = 3;
  d.hole_radius = 1.0;
  d.truncation = 20.0;
  const SpacePtr sp = build_space(d, 300);
  CHECK(sp->nodes[0] == doctest::Approx(1.0));
  CHECK(sp->nodes[sp->size() - 1] == doctest::Approx(20.0));
  const double first_h = sp->nodes[1] - sp->nodes[0];
  const double last_h = sp->nodes[sp->size() - 1] - sp->nodes[sp->size() - 2];
  CHECK(first_h < last_h);
  for (int k = 1; k < sp->size(); ++k) {
    CHECK(sp->nodes[k] > sp->nodes[k - 1]);
  }
  // Dirichlet at both ends
  CHECK(sp->dirichlet[0]);
  CHECK(sp->dirichlet[sp->size() - 1]);
}

TEST_CASE("stiffness is symmetric positive semidefinite") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (const DomainKind kind :
       {DomainKind::Ball, DomainKind::ExteriorRadial,
        DomainKind::SphereAngular}) {
    DomainSpec d;
    d.kind = kind;
    d.dim = 3;
    d.radius = 1.0;
    d.hole_radius = 1.0;
    d.truncation = 5.0;
    d.m = 2;
    d.n_factor = 2;
    const SpacePtr sp = build_space(d, 200);
    const Eigen::MatrixXd k_dense = Eigen::MatrixXd(sp->stiffness);
    CHECK((k_dense - k_dense.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd v = VectorXd::NullaryExpr(sp->size(),
                                         [&](int) { return unif(rng); });
      CHECK(v.dot(sp->stiffness * v) >= -1e-12 * v.squaredNorm());
    }
  }
}

TEST_CASE("inner_product_i identities") {
  const SpacePtr sp = build_space(unit_ball(), 1200);
  // first radial Dirichlet eigenfunction sin(pi r)/r, extended by pi at 0
  VectorXd u(sp->size());
  for (int k = 0; k < sp->size(); ++k) {
    const double r = sp->nodes[k];
    u[k] = r < 1e-12 ? kPi : std::sin(kPi * r) / r;
  }
  sp->apply_mask(u);
  const double m2 = u.dot(sp->mass * u);
  u /= std::sqrt(m2);
  const double ray = inner_product_i(*sp, 0.0, u, u);
  CHECK(std::abs(ray - kPi * kPi) <= 1e-3 * kPi * kPi);
  // linearity in kappa
  CHECK(inner_product_i(*sp, 1.0, u, u) ==
        doctest::Approx(ray + 1.0).epsilon(1e-10));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  VectorXd a = VectorXd::NullaryExpr(sp->size(), [&](int) { return unif(rng); });
  VectorXd b = VectorXd::NullaryExpr(sp->size(), [&](int) { return unif(rng); });
  CHECK(std::abs(inner_product_i(*sp, 0.3, a, b) -
                 inner_product_i(*sp, 0.3, b, a)) < 1e-12 *
            (1.0 + std::abs(inner_product_i(*sp, 0.3, a, b))));
}

TEST_CASE("coercivity violation fires at kappa <= -lambda1") {
  const SpacePtr sp = build_space(unit_ball(), 400);
  const VectorXd u = VectorXd::Ones(sp->size());
  const double l1 = sp->lambda1();
  CHECK_THROWS_AS(inner_product_i(*sp, -l1 - 0.1, u, u), CoercivityViolation);
  CHECK_THROWS_AS(inner_product_i(*sp, -2.0 * l1, u, u), CoercivityViolation);
  CHECK_NOTHROW(inner_product_i(*sp, -0.5 * l1, u, u));
}

TEST_CASE("integrate_power basics") {
  const SpacePtr sp = build_space(unit_ball(), 2000);
  const VectorXd one = VectorXd::Ones(sp->size());
  CHECK(std::abs(integrate_power(*sp, {{&one, 2.0}}) - 4.0 * kPi / 3.0) <=
        1e-6 * (4.0 * kPi / 3.0));

  // disjoint supports: product vanishes identically
  VectorXd lo_half = VectorXd::Zero(sp->size());
  VectorXd hi_half = VectorXd::Zero(sp->size());
  for (int k = 0; k < sp->size(); ++k) {
    if (sp->nodes[k] < 0.5) {
      lo_half[k] = 1.0;
    } else {
      hi_half[k] = 1.0;
    }
  }
  CHECK(integrate_power(*sp, {{&lo_half, 1.5}, {&hi_half, 1.5}}) == 0.0);

  CHECK_THROWS_AS(integrate_power(*sp, {{&one, 0.0}}), DomainError);
  VectorXd wrong = VectorXd::Ones(10);
  CHECK_THROWS_AS(integrate_power(*sp, {{&wrong, 2.0}}), DomainError);
}

TEST_CASE("quadrature error decreases by >= 3x under grid refinement") {
  // smooth integrand |u|^p with u = (1 - r^2)
  double prev_err = -1.0;
  const SpacePtr ref = build_space(unit_ball(), 16001);
  VectorXd uref(ref->size());
  for (int k = 0; k < ref->size(); ++k) {
    uref[k] = 1.0 - ref->nodes[k] * ref->nodes[k];
  }
  const double exact = integrate_power(*ref, {{&uref, 3.0}});
  for (const int n : {250, 500, 1000, 2000}) {
    const SpacePtr sp = build_space(unit_ball(), n);
    VectorXd u(sp->size());
    for (int k = 0; k < sp->size(); ++k) {
      u[k] = 1.0 - sp->nodes[k] * sp->nodes[k];
    }
    const double err = std::abs(integrate_power(*sp, {{&u, 3.0}}) - exact);
    if (prev_err > 0.0) CHECK(err * 3.0 <= prev_err);
    prev_err = err;
  }
}

TEST_CASE("apply_mask zeroes Dirichlet entries") {
  const SpacePtr sp = build_space(unit_ball(), 200);
  VectorXd v = VectorXd::Ones(sp->size());
  sp->apply_mask(v);
  CHECK(v[sp->size() - 1] == 0.0);  // Dirichlet at r = radius
  CHECK(v[0] == 1.0);               // natural at the origin
}

TEST_CASE("solve inverts the masked operator") {
  const SpacePtr sp = build_space(unit_ball(), 300);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  VectorXd rhs = VectorXd::NullaryExpr(sp->size(), [&](int) { return unif(rng); });
  sp->apply_mask(rhs);
  for (const double kappa : {0.0, 0.7, -2.0}) {
    const VectorXd x = sp->solve(kappa, rhs);
    VectorXd back = sp->stiffness * x + kappa * (sp->mass * x);
    sp->apply_mask(back);
    CHECK((back - rhs).lpNorm<Eigen::Infinity>() <=
          1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("bubble closed-form center value and support") {
  const SpacePtr sp = build_space(unit_ball(4), 2000);
  const double eps = 0.1;
  const DiscreteFunction w = bubble(sp, eps, 1.0, 0.5);
  // N=4: a_N = (N(N-2))^{(N-2)/4} = 8^{1/2}; w(0) = a_N eps^{-1}
  CHECK(w.values[0] == doctest::Approx(std::sqrt(8.0) * 10.0).epsilon(1e-12));
  for (int k = 0; k < sp->size(); ++k) {
    if (sp->nodes[k] > 0.5) CHECK(w.values[k] == 0.0);
    if (sp->nodes[k] < 0.25) CHECK(w.values[k] > 0.0);
  }
  // chi == 1 on [0, cutoff/2]: exact profile there
  for (int k = 0; k < sp->size(); ++k) {
    const double r = sp->nodes[k];
    if (r >= 0.24) break;
    const double exact = std::sqrt(8.0) * eps / (eps * eps + r * r);
    CHECK(w.values[k] == doctest::Approx(exact).epsilon(1e-12));
  }

  CHECK_THROWS_AS(bubble(build_space(unit_ball(3), 200), 0.1, 1.0, 0.5),
                  DomainError);
  CHECK_THROWS_AS(bubble(sp, 0.6, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(bubble(sp, 0.1, 1.0, 2.0), DomainError);
}

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(unit_sphere_area(4) ==
        doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
}
