#include "nehari/energy.hpp"

#include <cmath>
#include <utility>

namespace nehari {

namespace {

// sign(x) |x|^{q}; continuous at 0 for q > 0.
double pow_signed(double x, double q) {
  if (x == 0.0) return 0.0;
  return (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), q);
}

}  // namespace

std::vector<std::string> spec_diagnostics(const SystemSpec& spec,
                                          const Space& sp) {
  std::vector<std::string> out;
  if (spec.M < 1) out.push_back("M must be at least 1");
  if (!(spec.p > 2.0)) out.push_back("p must exceed 2");
  if (spec.N >= 3 && spec.p > spec.critical_exponent() + 1e-12) {
    out.push_back("p exceeds the critical exponent 2N/(N-2)");
  }
  if (spec.kappa.size() != spec.M || spec.mu.size() != spec.M ||
      spec.lambda.rows() != spec.M || spec.lambda.cols() != spec.M ||
      spec.alpha.rows() != spec.M || spec.beta.rows() != spec.M) {
    out.push_back("coefficient array sizes do not match M");
    return out;
  }
  for (int i = 0; i < spec.M; ++i) {
    if (!(spec.mu[i] > 0.0)) out.push_back("mu_" + std::to_string(i) + " <= 0");
  }
  for (int i = 0; i < spec.M; ++i) {
    for (int j = i + 1; j < spec.M; ++j) {
      if (!(spec.lambda(i, j) < 0.0)) {
        out.push_back("lambda_" + std::to_string(i) + std::to_string(j) +
                      " must be negative");
      }
      if (std::abs(spec.lambda(i, j) - spec.lambda(j, i)) >
          1e-12 * (1.0 + std::abs(spec.lambda(i, j)))) {
        out.push_back("lambda not symmetric at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
      }
    }
  }
  for (int i = 0; i < spec.M; ++i) {
    for (int j = 0; j < spec.M; ++j) {
      if (i == j) continue;
      if (!(spec.alpha(i, j) > 1.0) || !(spec.beta(i, j) > 1.0)) {
        out.push_back("exponents must exceed 1 at (" + std::to_string(i) +
                      "," + std::to_string(j) + ")");
      }
      if (std::abs(spec.alpha(i, j) + spec.beta(i, j) - spec.p) >
          1e-12 * spec.p) {
        out.push_back("alpha_ij + beta_ij != p at (" + std::to_string(i) +
                      "," + std::to_string(j) + ")");
      }
      if (std::abs(spec.alpha(i, j) - spec.beta(j, i)) > 1e-12 * spec.p) {
        out.push_back("alpha_ij != beta_ji at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
      }
    }
  }
  const double l1 = sp.lambda1();
  for (int i = 0; i < spec.M; ++i) {
    if (spec.kappa[i] <= -l1 + 1e-8 * (1.0 + std::abs(l1))) {
      out.push_back("kappa_" + std::to_string(i) +
                    " violates coercivity (lambda1 = " + std::to_string(l1) +
                    ")");
    }
  }
  return out;
}

void validate_spec(const SystemSpec& spec, const Space& sp) {
  const auto diag = spec_diagnostics(spec, sp);
  if (diag.empty()) return;
  const std::string& msg = diag.front();
  if (msg.find("lambda") == 0 || msg.find("mu") == 0) throw SignError(msg);
  if (msg.find("coercivity") != std::string::npos) {
    throw CoercivityViolation(msg);
  }
  throw DomainError(msg);
}

EnergyModel::EnergyModel(SystemSpec spec, SpacePtr space)
    : spec_(std::move(spec)), space_(std::move(space)) {
  validate_spec(spec_, *space_);
}

double EnergyModel::inner(int i, const VectorXd& u, const VectorXd& v) const {
  return inner_product_i(*space_, spec_.kappa[i], u, v);
}

double EnergyModel::norm_i(int i, const VectorXd& u) const {
  return std::sqrt(std::max(0.0, inner(i, u, u)));
}

CouplingData EnergyModel::coeffs_of(const FunctionTuple& u) const {
  CouplingData c;
  c.M = spec_.M;
  c.p = spec_.p;
  c.alpha = spec_.alpha;
  c.beta = spec_.beta;
  c.a.resize(c.M);
  c.b.resize(c.M);
  c.d = MatrixXd::Zero(c.M, c.M);
  for (int i = 0; i < c.M; ++i) {
    c.a[i] = 0.5 * inner(i, u.comp[i], u.comp[i]);
    c.b[i] = spec_.mu[i] / spec_.p *
             integrate_power(*space_, {{&u.comp[i], spec_.p}});
    for (int j = 0; j < c.M; ++j) {
      if (j == i) continue;
      c.d(i, j) = -0.5 * spec_.lambda(i, j) *
                  integrate_power(*space_, {{&u.comp[j], spec_.alpha(i, j)},
                                            {&u.comp[i], spec_.beta(i, j)}});
    }
  }
  return c;
}

double EnergyModel::energy(const FunctionTuple& u) const {
  double v = 0.0;
  for (int i = 0; i < spec_.M; ++i) {
    v += 0.5 * inner(i, u.comp[i], u.comp[i]);
    v -= spec_.mu[i] / spec_.p *
         integrate_power(*space_, {{&u.comp[i], spec_.p}});
    for (int j = 0; j < spec_.M; ++j) {
      if (j == i) continue;
      v -= 0.5 * spec_.lambda(i, j) *
           integrate_power(*space_, {{&u.comp[j], spec_.alpha(i, j)},
                                     {&u.comp[i], spec_.beta(i, j)}});
    }
  }
  return v;
}

VectorXd EnergyModel::residual_vector(const FunctionTuple& u, int i) const {
  const int n = space_->size();
  VectorXd nonlin(n);
  for (int k = 0; k < n; ++k) {
    double v = spec_.mu[i] * pow_signed(u.comp[i][k], spec_.p - 1.0);
    for (int j = 0; j < spec_.M; ++j) {
      if (j == i) continue;
      v += spec_.lambda(i, j) * spec_.beta(i, j) *
           std::pow(std::abs(u.comp[j][k]), spec_.alpha(i, j)) *
           pow_signed(u.comp[i][k], spec_.beta(i, j) - 1.0);
    }
    nonlin[k] = v;
  }
  VectorXd r = space_->stiffness * u.comp[i] +
               spec_.kappa[i] * (space_->mass * u.comp[i]) -
               space_->mass * nonlin;
  space_->apply_mask(r);
  return r;
}

FunctionTuple EnergyModel::energy_gradient(const FunctionTuple& u) const {
  FunctionTuple g;
  g.space = space_;
  g.comp.resize(spec_.M);
  for (int i = 0; i < spec_.M; ++i) {
    g.comp[i] = space_->solve(spec_.kappa[i], residual_vector(u, i));
  }
  return g;
}

VectorXd EnergyModel::nehari_residuals(const FunctionTuple& u) const {
  VectorXd r(spec_.M);
  for (int i = 0; i < spec_.M; ++i) {
    r[i] = residual_vector(u, i).dot(u.comp[i]);
  }
  return r;
}

NehariPoint EnergyModel::project_nehari(const FunctionTuple& u) const {
  const CouplingData c = coeffs_of(u);
  for (int i = 0; i < spec_.M; ++i) {
    if (!(c.a[i] > 0.0) || !(c.b[i] > 0.0)) {
      throw TrivialComponent("project_nehari: component " + std::to_string(i) +
                             " is trivial");
    }
  }
  const CriticalPoint cp = maximize(c, 1e-12, 300);
  if (!cp.converged) {
    throw NotInU("project_nehari: inner problem has no interior critical "
                 "point (u not in U)");
  }
  NehariPoint np;
  np.s = cp.s;
  np.tuple.space = space_;
  np.tuple.comp.resize(spec_.M);
  for (int i = 0; i < spec_.M; ++i) np.tuple.comp[i] = cp.s[i] * u.comp[i];
  np.energy = cp.value;  // J_u(s_u) = J(s_u u)
  np.residuals = nehari_residuals(np.tuple);
  return np;
}

FunctionTuple EnergyModel::normalize_to_torus(const FunctionTuple& u) const {
  FunctionTuple out;
  out.space = space_;
  out.comp.resize(spec_.M);
  for (int i = 0; i < spec_.M; ++i) {
    const double n = norm_i(i, u.comp[i]);
    if (!(n > 0.0)) {
      throw TrivialComponent("normalize_to_torus: component " +
                             std::to_string(i) + " is trivial");
    }
    out.comp[i] = u.comp[i] / n;
  }
  return out;
}

double EnergyModel::psi(const NehariPoint& np) const {
  return (spec_.p - 2.0) / (2.0 * spec_.p) * np.s.squaredNorm();
}

double EnergyModel::psi(const FunctionTuple& u) const {
  return psi(project_nehari(u));
}

FunctionTuple EnergyModel::psi_gradient(const FunctionTuple& u,
                                        const NehariPoint& np) const {
  const FunctionTuple g = energy_gradient(np.tuple);
  FunctionTuple out;
  out.space = space_;
  out.comp.resize(spec_.M);
  for (int i = 0; i < spec_.M; ++i) {
    VectorXd w = np.s[i] * g.comp[i];
    // Tangential projection; u_i has unit ||.||_i norm on the torus.
    w -= inner(i, w, u.comp[i]) * u.comp[i];
    out.comp[i] = std::move(w);
  }
  return out;
}

FunctionTuple EnergyModel::psi_gradient(const FunctionTuple& u) const {
  return psi_gradient(u, project_nehari(u));
}

double EnergyModel::tangent_norm(const FunctionTuple& v) const {
  double n2 = 0.0;
  for (int i = 0; i < spec_.M; ++i) n2 += inner(i, v.comp[i], v.comp[i]);
  return std::sqrt(std::max(0.0, n2));
}

}  // namespace nehari
