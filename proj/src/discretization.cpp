#include "nehari/discretization.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <mutex>
#include <numbers>

namespace nehari {

namespace {

std::mutex cache_mutex;

using Factorization = Eigen::SimplicialLDLT<SparseMat>;

double measure_density(const DomainSpec& dom, double t) {
  switch (dom.kind) {
    case DomainKind::Ball:
    case DomainKind::ExteriorRadial:
      return unit_sphere_area(dom.dim) * std::pow(t, dom.dim - 1);
    case DomainKind::SphereAngular:
      return unit_sphere_area(dom.m) * unit_sphere_area(dom.n_factor) *
             std::pow(std::sin(t), dom.m - 1) *
             std::pow(std::cos(t), dom.n_factor - 1);
  }
  return 0.0;
}

}  // namespace

double unit_sphere_area(int N) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

void DomainSpec::validate() const {
  if (dim < 3) throw DomainError("DomainSpec: N >= 3 required");
  switch (kind) {
    case DomainKind::Ball:
      if (!(radius > 0.0)) throw DomainError("DomainSpec: radius <= 0");
      break;
    case DomainKind::ExteriorRadial:
      if (hole_radius < 0.0) throw DomainError("DomainSpec: hole_radius < 0");
      if (!(truncation > hole_radius)) {
        throw DomainError("DomainSpec: truncation <= hole_radius");
      }
      break;
    case DomainKind::SphereAngular:
      if (m < 2 || n_factor < 2) {
        throw DomainError("DomainSpec: sphere factors need m, n >= 2");
      }
      if (m + n_factor != dim + 1) {
        throw DomainError("DomainSpec: m + n must equal N + 1");
      }
      break;
  }
}

void Space::apply_mask(VectorXd& v) const {
  for (int k = 0; k < size(); ++k) {
    if (dirichlet[k]) v[k] = 0.0;
  }
}

SpacePtr build_space(const DomainSpec& dom, int n) {
  dom.validate();
  if (n < 16) throw DomainError("build_space: n < 16");

  auto sp = std::make_shared<Space>();
  sp->domain = dom;
  sp->nodes.resize(n);
  sp->dirichlet.assign(n, false);

  double lo = 0.0, hi = 0.0;
  switch (dom.kind) {
    case DomainKind::Ball:
      lo = 0.0;
      hi = dom.radius;
      for (int k = 0; k < n; ++k) {
        sp->nodes[k] = lo + (hi - lo) * k / (n - 1);
      }
      sp->dirichlet[n - 1] = true;
      break;
    case DomainKind::ExteriorRadial: {
      lo = dom.hole_radius;
      hi = dom.truncation;
      // Geometric grading toward the hole.
      const double gamma = 2.0;
      for (int k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / (n - 1);
        sp->nodes[k] =
            lo + (hi - lo) * std::expm1(gamma * x) / std::expm1(gamma);
      }
      if (dom.hole_radius > 0.0) sp->dirichlet[0] = true;
      sp->dirichlet[n - 1] = true;
      break;
    }
    case DomainKind::SphereAngular:
      lo = 0.0;
      hi = 0.5 * std::numbers::pi;
      for (int k = 0; k < n; ++k) {
        sp->nodes[k] = lo + (hi - lo) * k / (n - 1);
      }
      break;
  }

  // Trapezoidal quadrature on the weighted measure.
  sp->quad = VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    double h = 0.0;
    if (k > 0) h += sp->nodes[k] - sp->nodes[k - 1];
    if (k + 1 < n) h += sp->nodes[k + 1] - sp->nodes[k];
    sp->quad[k] = measure_density(dom, sp->nodes[k]) * 0.5 * h;
  }

  // Stiffness: element assembly of int w u'v' with midpoint density.
  std::vector<Eigen::Triplet<double>> kt;
  kt.reserve(4 * n);
  for (int k = 0; k + 1 < n; ++k) {
    const double h = sp->nodes[k + 1] - sp->nodes[k];
    const double wm =
        measure_density(dom, 0.5 * (sp->nodes[k] + sp->nodes[k + 1]));
    const double c = wm / h;
    kt.emplace_back(k, k, c);
    kt.emplace_back(k + 1, k + 1, c);
    kt.emplace_back(k, k + 1, -c);
    kt.emplace_back(k + 1, k, -c);
  }
  sp->stiffness.resize(n, n);
  sp->stiffness.setFromTriplets(kt.begin(), kt.end());

  std::vector<Eigen::Triplet<double>> mt;
  mt.reserve(n);
  for (int k = 0; k < n; ++k) mt.emplace_back(k, k, sp->quad[k]);
  sp->mass.resize(n, n);
  sp->mass.setFromTriplets(mt.begin(), mt.end());

  return sp;
}

VectorXd Space::solve(double kappa, const VectorXd& rhs) const {
  std::shared_ptr<Factorization> fact;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    for (const auto& [k, f] : solvers_) {
      if (k == kappa) {
        fact = std::static_pointer_cast<Factorization>(f);
        break;
      }
    }
    if (!fact) {
      SparseMat a = stiffness + kappa * mass;
      // Constrain masked nodes: identity row/column.
      std::vector<Eigen::Triplet<double>> tr;
      tr.reserve(a.nonZeros());
      for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMat::InnerIterator it(a, col); it; ++it) {
          if (dirichlet[it.row()] || dirichlet[it.col()]) continue;
          tr.emplace_back(it.row(), it.col(), it.value());
        }
      }
      for (int k = 0; k < size(); ++k) {
        if (dirichlet[k]) tr.emplace_back(k, k, 1.0);
      }
      SparseMat constrained(size(), size());
      constrained.setFromTriplets(tr.begin(), tr.end());
      fact = std::make_shared<Factorization>(constrained);
      if (fact->info() != Eigen::Success) {
        throw Error("Space::solve: factorization failed");
      }
      solvers_.emplace_back(kappa, fact);
    }
  }
  VectorXd b = rhs;
  apply_mask(b);
  VectorXd x = fact->solve(b);
  apply_mask(x);
  return x;
}

double Space::lambda1() const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (lambda1_ >= 0.0) return lambda1_;
  }
  // Shifted inverse iteration on K x = lambda M x with shift 1.
  const double shift = 1.0;
  VectorXd x = VectorXd::Ones(size());
  apply_mask(x);
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    VectorXd y = solve(shift, mass * x);
    const double mn = std::sqrt(y.dot(mass * y));
    if (!(mn > 0.0)) throw Error("lambda1: degenerate iterate");
    y /= mn;
    const double next = y.dot(stiffness * y) / y.dot(mass * y);
    const bool done = std::abs(next - lam) <= 1e-12 * (1.0 + std::abs(next));
    lam = next;
    x = y;
    if (done && it > 3) break;
  }
  std::lock_guard<std::mutex> lock(cache_mutex);
  lambda1_ = lam;
  return lam;
}

double inner_product_i(const Space& sp, double kappa, const VectorXd& u,
                       const VectorXd& v) {
  if (u.size() != sp.size() || v.size() != sp.size()) {
    throw DomainError("inner_product_i: size mismatch");
  }
  const double l1 = sp.lambda1();
  if (kappa <= -l1 + 1e-8 * (1.0 + std::abs(l1))) {
    throw CoercivityViolation("inner_product_i: kappa <= -lambda1");
  }
  return u.dot(sp.stiffness * v) + kappa * u.dot(sp.mass * v);
}

double integrate_power(
    const Space& sp,
    const std::vector<std::pair<const VectorXd*, double>>& factors) {
  for (const auto& [f, e] : factors) {
    if (f->size() != sp.size()) {
      throw DomainError("integrate_power: size mismatch");
    }
    if (!(e > 0.0)) throw DomainError("integrate_power: exponent <= 0");
  }
  double total = 0.0;
  for (int k = 0; k < sp.size(); ++k) {
    double prod = sp.quad[k];
    for (const auto& [f, e] : factors) {
      if (prod == 0.0) break;
      prod *= std::pow(std::abs((*f)[k]), e);
    }
    total += prod;
  }
  return total;
}

DiscreteFunction bubble(const SpacePtr& sp, double eps, double mu,
                        double cutoff_radius) {
  if (sp->domain.kind != DomainKind::Ball) {
    throw DomainError("bubble: ball space required");
  }
  const int N = sp->domain.dim;
  if (N < 4) throw DomainError("bubble: N >= 4 required");
  if (!(eps > 0.0) || !(eps <= cutoff_radius) ||
      !(cutoff_radius <= sp->domain.radius) || !(mu > 0.0)) {
    throw DomainError("bubble: bad parameters");
  }
  const double a_n = std::pow(N * (N - 2.0), 0.25 * (N - 2.0));
  const double scale = std::pow(mu, 0.25 * (2.0 - N)) * a_n;

  DiscreteFunction f;
  f.space = sp;
  f.values.resize(sp->size());
  const double half = 0.5 * cutoff_radius;
  for (int k = 0; k < sp->size(); ++k) {
    const double r = sp->nodes[k];
    double chi;
    if (r <= half) {
      chi = 1.0;
    } else if (r >= cutoff_radius) {
      chi = 0.0;
    } else {
      const double t = (r - half) / half;
      chi = 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    }
    f.values[k] =
        chi * scale * std::pow(eps / (eps * eps + r * r), 0.5 * (N - 2.0));
  }
  sp->apply_mask(f.values);
  return f;
}

}  // namespace nehari
