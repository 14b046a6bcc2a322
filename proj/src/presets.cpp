#include "nehari/presets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nehari {

namespace {

MatrixXd submatrix(const MatrixXd& m, const std::vector<int>& idx) {
  MatrixXd out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      out(r, c) = m(idx[r], idx[c]);
    }
  }
  return out;
}

VectorXd subvector(const VectorXd& v, const std::vector<int>& idx) {
  VectorXd out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out[r] = v[idx[r]];
  return out;
}

VectorXd interior_bump(const Space& sp, double a, double b) {
  VectorXd v = VectorXd::Zero(sp.size());
  for (int k = 0; k < sp.size(); ++k) {
    const double x = sp.nodes[k];
    if (x <= a || x >= b) continue;
    const double s = std::sin(std::numbers::pi * (x - a) / (b - a));
    v[k] = s * s;
  }
  sp.apply_mask(v);
  return v;
}

}  // namespace

Preset preset_exterior(int N, double R0, double L, int n,
                       const SystemSpec& params) {
  Preset pr;
  pr.spec = params;
  pr.spec.N = N;
  pr.spec.domain.kind = DomainKind::ExteriorRadial;
  pr.spec.domain.dim = N;
  pr.spec.domain.hole_radius = R0;
  pr.spec.domain.truncation = L;
  if (!(pr.spec.p < pr.spec.critical_exponent() - 1e-12)) {
    throw DomainError("preset_exterior: p must be strictly subcritical");
  }
  for (int i = 0; i < pr.spec.M; ++i) {
    if (!(pr.spec.kappa[i] > 0.0)) {
      throw DomainError("preset_exterior: kappa_i > 0 required");
    }
  }
  pr.space = build_space(pr.spec.domain, n);
  validate_spec(pr.spec, *pr.space);
  return pr;
}

Preset preset_yamabe(int m, int n_dim, int grid_n, const VectorXd& mu,
                     const MatrixXd& lambda, const MatrixXd& alpha,
                     const MatrixXd& beta) {
  if (m < 2 || n_dim < 2) {
    throw DomainError("preset_yamabe: m, n >= 2 required");
  }
  const int N = m + n_dim - 1;
  Preset pr;
  pr.spec.M = static_cast<int>(mu.size());
  pr.spec.N = N;
  pr.spec.p = 2.0 * N / (N - 2.0);
  pr.spec.kappa = VectorXd::Constant(pr.spec.M, N * (N - 2.0) / 4.0);
  pr.spec.mu = mu;
  pr.spec.lambda = lambda;
  pr.spec.alpha = alpha;
  pr.spec.beta = beta;
  pr.spec.domain.kind = DomainKind::SphereAngular;
  pr.spec.domain.dim = N;
  pr.spec.domain.m = m;
  pr.spec.domain.n_factor = n_dim;
  pr.space = build_space(pr.spec.domain, grid_n);
  validate_spec(pr.spec, *pr.space);
  return pr;
}

Preset preset_brezis_nirenberg(int N, double radius, int n,
                               const VectorXd& kappa, const VectorXd& mu,
                               const MatrixXd& lambda, const MatrixXd& alpha,
                               const MatrixXd& beta) {
  if (N < 4) throw DomainError("preset_brezis_nirenberg: N >= 4 required");
  const int M = static_cast<int>(mu.size());
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      if (N == 4 && (std::abs(alpha(i, j) - 2.0) > 1e-12 ||
                     std::abs(beta(i, j) - 2.0) > 1e-12)) {
        throw DimensionRule("N = 4 requires alpha = beta = 2");
      }
      if (N == 5 && std::min(alpha(i, j), beta(i, j)) < 4.0 / 3.0 - 1e-12) {
        throw DimensionRule("N = 5 requires min{alpha,beta} >= 4/3");
      }
    }
  }
  Preset pr;
  pr.spec.M = M;
  pr.spec.N = N;
  pr.spec.p = 2.0 * N / (N - 2.0);
  pr.spec.kappa = kappa;
  pr.spec.mu = mu;
  pr.spec.lambda = lambda;
  pr.spec.alpha = alpha;
  pr.spec.beta = beta;
  pr.spec.domain.kind = DomainKind::Ball;
  pr.spec.domain.dim = N;
  pr.spec.domain.radius = radius;
  pr.space = build_space(pr.spec.domain, n);
  for (int i = 0; i < M; ++i) {
    if (!(kappa[i] < 0.0)) {
      throw DomainError("preset_brezis_nirenberg: kappa_i < 0 required");
    }
  }
  validate_spec(pr.spec, *pr.space);  // coercivity: kappa_i > -lambda_1
  return pr;
}

std::pair<DiscreteFunction, double> single_equation_ground_state(
    const SpacePtr& space, double kappa, double mu, double p,
    const DescentConfig& cfg) {
  SystemSpec spec;
  spec.M = 1;
  spec.N = space->domain.dim;
  spec.p = p;
  spec.kappa = VectorXd::Constant(1, kappa);
  spec.mu = VectorXd::Constant(1, mu);
  spec.lambda = MatrixXd::Zero(1, 1);
  spec.alpha = MatrixXd::Zero(1, 1);
  spec.beta = MatrixXd::Zero(1, 1);
  spec.domain = space->domain;
  EnergyModel model(spec, space);

  const auto reports = multistart(model, genus_seeds(model, 1), cfg);
  if (reports.empty()) {
    throw Error("single_equation_ground_state: descent did not converge");
  }
  DiscreteFunction out;
  out.space = space;
  out.values = reports.front().solution.tuple.comp[0].cwiseAbs();
  return {out, reports.front().psi_value};
}

double sobolev_constant(const SpacePtr& space, double kappa, double mu,
                        double p, const VectorXd& start, int max_iter) {
  const Space& sp = *space;
  const auto quadratic = [&](const VectorXd& w) {
    return w.dot(sp.stiffness * w) + kappa * w.dot(sp.mass * w);
  };
  const auto pnorm = [&](const VectorXd& w) {
    return mu * integrate_power(sp, {{&w, p}});
  };

  VectorXd w;
  if (start.size() == sp.size()) {
    w = start;
  } else if (sp.domain.kind == DomainKind::Ball &&
             p >= 2.0 * sp.domain.dim / (sp.domain.dim - 2.0) - 1e-9) {
    w = bubble(space, sp.domain.radius / 20.0, 1.0, sp.domain.radius).values;
  } else {
    const double lo = sp.nodes[0], hi = sp.nodes[sp.size() - 1];
    w = interior_bump(sp, lo, lo + 0.5 * (hi - lo));
  }
  sp.apply_mask(w);
  w /= std::sqrt(quadratic(w));

  double ip = quadratic(w);
  double d = pnorm(w);
  double q = ip / std::pow(d, 2.0 / p);
  for (int it = 0; it < max_iter; ++it) {
    // Euclidean gradient of the quotient, preconditioned by the form itself.
    VectorXd gd(sp.size());
    for (int k = 0; k < sp.size(); ++k) {
      gd[k] = sp.quad[k] * mu * p *
              std::pow(std::abs(w[k]), p - 2.0) * w[k];
    }
    VectorXd grad = 2.0 * (sp.stiffness * w) + 2.0 * kappa * (sp.mass * w);
    grad = std::pow(d, -2.0 / p) * grad -
           (2.0 / p) * ip * std::pow(d, -2.0 / p - 1.0) * gd;
    sp.apply_mask(grad);
    VectorXd dir = sp.solve(std::max(kappa, 1e-8), grad);

    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 50; ++ls) {
      VectorXd cand = w - t * dir;
      const double cip = quadratic(cand);
      if (cip > 0.0) {
        cand /= std::sqrt(cip);
        const double cd = pnorm(cand);
        if (cd > 0.0) {
          const double cq = 1.0 / std::pow(cd, 2.0 / p);
          if (cq < q * (1.0 - 1e-14)) {
            w = std::move(cand);
            ip = 1.0;
            d = cd;
            const double prev = q;
            q = cq;
            accepted = true;
            if (prev - q <= 1e-12 * (1.0 + q)) it = max_iter;  // converged
            break;
          }
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return q;
}

double separated_bump_energy(const Preset& exterior, double R,
                             const DescentConfig& cfg) {
  const SystemSpec& spec = exterior.spec;
  const Space& sp = *exterior.space;
  const int M = spec.M;
  const double R0 = spec.domain.hole_radius;
  const double L = spec.domain.truncation;
  const double slab = (L - R0) / M;
  if (!(R > 0.0) || R > slab - 0.5) {
    throw ResolutionTooCoarse(
        "separated_bump_energy: shell width does not fit the domain");
  }

  FunctionTuple u;
  u.space = exterior.space;
  u.comp.resize(M);
  for (int i = 0; i < M; ++i) {
    const double a = R0 + i * slab;  // fixed inner edge per component
    DomainSpec sub;
    sub.kind = DomainKind::ExteriorRadial;
    sub.dim = spec.N;
    sub.hole_radius = a;
    sub.truncation = a + R;
    const int n_sub = std::max(256, static_cast<int>(sp.size() * R / (L - R0)));
    SpacePtr subspace = build_space(sub, n_sub);
    const DiscreteFunction w = single_equation_ground_state(
                                   subspace, spec.kappa[i], spec.mu[i],
                                   spec.p, cfg)
                                   .first;

    // Linear interpolation of the shell solution onto the outer grid.
    VectorXd vi = VectorXd::Zero(sp.size());
    const VectorXd& sn = subspace->nodes;
    for (int k = 0; k < sp.size(); ++k) {
      const double x = sp.nodes[k];
      if (x <= sn[0] || x >= sn[sn.size() - 1]) continue;
      const auto* up = std::upper_bound(sn.data(), sn.data() + sn.size(), x);
      const int hi_idx = static_cast<int>(up - sn.data());
      const double t = (x - sn[hi_idx - 1]) / (sn[hi_idx] - sn[hi_idx - 1]);
      vi[k] = (1.0 - t) * w.values[hi_idx - 1] + t * w.values[hi_idx];
    }
    sp.apply_mask(vi);
    u.comp[i] = std::move(vi);
  }

  EnergyModel model(spec, exterior.space);
  return model.project_nehari(u).energy;
}

namespace {

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Exponent q minimizing the curvature of y_i eps_i^{-q} over log-spaced
// eps: exact when y = eps^q (A + B |ln eps|), which is the half-critical
// profile. Plain log-log fits are biased by the log factor.
double linearity_fit(const std::vector<double>& leps,
                     const std::vector<double>& y, double q_lo, double q_hi) {
  const auto cost = [&](double q) {
    std::vector<double> z(y.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      z[i] = y[i] * std::exp(-q * leps[i]);
      mean += z[i];
    }
    mean /= y.size();
    double c = 0.0;
    for (std::size_t i = 2; i < z.size(); ++i) {
      const double d2 = z[i] - 2.0 * z[i - 1] + z[i - 2];
      c += d2 * d2;
    }
    return c / (mean * mean);
  };
  double best_q = q_lo, best = cost(q_lo);
  const int steps = 4000;
  for (int k = 1; k <= steps; ++k) {
    const double q = q_lo + (q_hi - q_lo) * k / steps;
    const double c = cost(q);
    if (c < best) {
      best = c;
      best_q = q;
    }
  }
  return best_q;
}

// RMS residual of fitting y = c + shape (intercept only).
double intercept_residual(const std::vector<double>& shape,
                          const std::vector<double>& y) {
  double mean = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) mean += y[i] - shape[i];
  mean /= y.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - shape[i] - mean;
    rss += r * r;
  }
  return std::sqrt(rss / y.size());
}

}  // namespace

BubbleScan bubble_scan(const SpacePtr& ball_space, double mu,
                       double cutoff_radius, const std::vector<double>& eps,
                       const std::vector<double>& betas) {
  const Space& sp = *ball_space;
  const int N = sp.domain.dim;
  if (N < 4) throw DomainError("bubble_scan: N >= 4 required");
  if (eps.size() < 3) throw DomainError("bubble_scan: need >= 3 eps values");
  for (std::size_t i = 1; i < eps.size(); ++i) {
    if (!(eps[i] < eps[i - 1])) {
      throw DomainError("bubble_scan: eps must be decreasing");
    }
  }
  if (eps.front() > 0.25 * cutoff_radius) {
    throw DomainError("bubble_scan: max eps must be <= cutoff/4");
  }
  const double h = sp.nodes[1] - sp.nodes[0];
  if (eps.back() < 16.0 * h) {
    throw DomainError("bubble_scan: bubble core spans < 16 nodes");
  }

  BubbleScan scan;
  scan.eps = eps;
  const double pstar = 2.0 * N / (N - 2.0);

  // The eps^{N-2} defect of ||w||^2 sits far below the O((h/eps)^2)
  // quadrature bias of any workable grid, so the gradient term is computed
  // on two refined grids and Richardson-extrapolated in h.
  const int n1 = std::max(20001, 4 * sp.size());
  const SpacePtr fine1 = build_space(sp.domain, n1);
  const SpacePtr fine2 = build_space(sp.domain, 2 * n1 - 1);

  for (double e : eps) {
    const VectorXd w = bubble(ball_space, e, mu, cutoff_radius).values;
    const VectorXd w1 = bubble(fine1, e, mu, cutoff_radius).values;
    const VectorXd w2 = bubble(fine2, e, mu, cutoff_radius).values;
    const double y1 = w1.dot(fine1->stiffness * w1);
    const double y2 = w2.dot(fine2->stiffness * w2);
    scan.grad_norm2.push_back((4.0 * y2 - y1) / 3.0);
    scan.crit_norm.push_back(integrate_power(sp, {{&w, pstar}}));
    scan.l2_norm2.push_back(integrate_power(sp, {{&w, 2.0}}));
    for (double b : betas) {
      scan.beta_norms[b].push_back(integrate_power(sp, {{&w, b}}));
    }
  }

  // Aitken extrapolation of ||w||^2 from the three smallest eps.
  {
    const std::size_t n = eps.size();
    const double y1 = scan.grad_norm2[n - 3], y2 = scan.grad_norm2[n - 2],
                 y3 = scan.grad_norm2[n - 1];
    scan.limit_grad_norm2 = (y1 * y3 - y2 * y2) / (y1 + y3 - 2.0 * y2);
  }

  // Fitting consecutive differences cancels the unknown limit exactly.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    const double diff =
        std::abs(scan.grad_norm2[i] - scan.grad_norm2[i + 1]);
    if (diff > 0.0) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(diff));
    }
  }
  scan.slope_defect = lsq_slope(lx, ly);

  lx.clear();
  ly.clear();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(scan.l2_norm2[i]));
  }
  scan.slope_l2 = lsq_slope(lx, ly);
  if (N == 4) {
    std::vector<double> shape_plain, shape_log;
    for (double e : eps) {
      shape_plain.push_back(2.0 * std::log(e));
      shape_log.push_back(2.0 * std::log(e) + std::log(std::abs(std::log(e))));
    }
    scan.n4_residual_plain = intercept_residual(shape_plain, ly);
    scan.n4_residual_log = intercept_residual(shape_log, ly);
  }

  for (double b : betas) {
    lx.clear();
    ly.clear();
    for (std::size_t i = 0; i < eps.size(); ++i) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(scan.beta_norms[b][i]));
    }
    if (std::abs(b - 0.5 * pstar) < 1e-9) {
      scan.slope_beta[b] =
          linearity_fit(lx, scan.beta_norms[b], 0.5 * N - 1.0, 0.5 * N + 1.0);
    } else {
      scan.slope_beta[b] = lsq_slope(lx, ly);
    }
  }
  return scan;
}

ThresholdReport bn_threshold_check(const Preset& bn, const DescentConfig& cfg) {
  const SystemSpec& spec = bn.spec;
  const int M = spec.M;
  if (M > 3) throw DomainError("bn_threshold_check: M <= 3");
  const int N = spec.N;

  ThresholdReport rep;
  EnergyModel model(spec, bn.space);
  {
    const auto reports = multistart(model, std::max(2, M), cfg);
    if (reports.empty()) {
      rep.conclusive = false;
      return rep;
    }
    rep.c0 = reports.front().psi_value;
    for (const auto& r : reports) {
      if (r.status != SolveStatus::Converged) rep.conclusive = false;
    }
  }

  rep.S = sobolev_constant(bn.space, 0.0, 1.0, spec.critical_exponent());

  rep.rhs = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << M) - 1; ++mask) {
    std::set<int> I;
    std::vector<int> keep;
    for (int i = 0; i < M; ++i) {
      if (mask & (1 << i)) {
        I.insert(i);
      } else {
        keep.push_back(i);
      }
    }
    double cI;
    if (keep.size() == 1) {
      cI = single_equation_ground_state(bn.space, spec.kappa[keep[0]],
                                        spec.mu[keep[0]], spec.p, cfg)
               .second;
    } else {
      SystemSpec sub = spec;
      sub.M = static_cast<int>(keep.size());
      sub.kappa = subvector(spec.kappa, keep);
      sub.mu = subvector(spec.mu, keep);
      sub.lambda = submatrix(spec.lambda, keep);
      sub.alpha = submatrix(spec.alpha, keep);
      sub.beta = submatrix(spec.beta, keep);
      EnergyModel submodel(sub, bn.space);
      const auto reports = multistart(submodel, 2, cfg);
      if (reports.empty()) {
        rep.conclusive = false;
        continue;
      }
      cI = reports.front().psi_value;
    }
    rep.cI[I] = cI;
    double bubbles = 0.0;
    for (int i : I) {
      bubbles += std::pow(spec.mu[i], -0.5 * (N - 2.0)) *
                 std::pow(rep.S, 0.5 * N) / N;
    }
    rep.rhs = std::min(rep.rhs, cI + bubbles);
  }

  rep.satisfied = rep.conclusive &&
                  rep.c0 < rep.rhs - 1e-4 * (1.0 + std::abs(rep.rhs));
  return rep;
}

}  // namespace nehari
