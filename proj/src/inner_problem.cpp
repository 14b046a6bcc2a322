#include "nehari/inner_problem.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

namespace nehari {

namespace {

void check_positive(const VectorXd& s) {
  for (int i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) throw DomainError("eval_J: s must be positive");
  }
}

}  // namespace

void CouplingData::validate() const {
  if (M < 1) throw DomainError("CouplingData: M < 1");
  if (!(p > 2.0)) throw DomainError("CouplingData: p must exceed 2");
  if (a.size() != M || b.size() != M || d.rows() != M || d.cols() != M ||
      alpha.rows() != M || alpha.cols() != M || beta.rows() != M ||
      beta.cols() != M) {
    throw DomainError("CouplingData: size mismatch");
  }
  for (int i = 0; i < M; ++i) {
    if (!(a[i] > 0.0)) throw DomainError("CouplingData: a_i <= 0");
    if (!(b[i] > 0.0)) throw DomainError("CouplingData: b_i <= 0");
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      if (d(i, j) < 0.0) throw DomainError("CouplingData: d_ij < 0");
      if (std::abs(d(i, j) - d(j, i)) >
          1e-12 * (1.0 + std::abs(d(i, j)))) {
        throw DomainError("CouplingData: d not symmetric");
      }
      if (!(alpha(i, j) > 1.0) || !(beta(i, j) > 1.0)) {
        throw DomainError("CouplingData: exponents must exceed 1");
      }
      if (std::abs(alpha(i, j) + beta(i, j) - p) > 1e-12 * p) {
        throw DomainError("CouplingData: alpha_ij + beta_ij != p");
      }
      if (std::abs(alpha(i, j) - beta(j, i)) > 1e-12 * p) {
        throw DomainError("CouplingData: alpha_ij != beta_ji");
      }
    }
  }
}

bool CouplingData::feasible() const {
  for (int i = 0; i < M; ++i) {
    double cross = 0.0;
    for (int j = 0; j < M; ++j) {
      if (j != i) cross += d(i, j) * beta(i, j);
    }
    if (!(p * b[i] > 2.0 * cross)) return false;
  }
  return true;
}

double eval_J(const CouplingData& c, const VectorXd& s) {
  check_positive(s);
  double v = 0.0;
  for (int i = 0; i < c.M; ++i) {
    v += c.a[i] * s[i] * s[i] - c.b[i] * std::pow(s[i], c.p);
  }
  for (int i = 0; i < c.M; ++i) {
    for (int j = 0; j < c.M; ++j) {
      if (j == i || c.d(i, j) == 0.0) continue;
      v += c.d(i, j) * std::pow(s[j], c.alpha(i, j)) *
           std::pow(s[i], c.beta(i, j));
    }
  }
  return v;
}

VectorXd grad_J(const CouplingData& c, const VectorXd& s) {
  check_positive(s);
  VectorXd g(c.M);
  for (int i = 0; i < c.M; ++i) {
    double gi = 2.0 * c.a[i] * s[i] - c.p * c.b[i] * std::pow(s[i], c.p - 1.0);
    for (int j = 0; j < c.M; ++j) {
      if (j == i || c.d(i, j) == 0.0) continue;
      gi += 2.0 * c.d(i, j) * c.beta(i, j) * std::pow(s[j], c.alpha(i, j)) *
            std::pow(s[i], c.beta(i, j) - 1.0);
    }
    g[i] = gi;
  }
  return g;
}

MatrixXd hess_J(const CouplingData& c, const VectorXd& s) {
  check_positive(s);
  MatrixXd h = MatrixXd::Zero(c.M, c.M);
  for (int i = 0; i < c.M; ++i) {
    double hii = 2.0 * c.a[i] -
                 c.p * (c.p - 1.0) * c.b[i] * std::pow(s[i], c.p - 2.0);
    for (int j = 0; j < c.M; ++j) {
      if (j == i || c.d(i, j) == 0.0) continue;
      const double aij = c.alpha(i, j), bij = c.beta(i, j);
      hii += 2.0 * c.d(i, j) * bij * (bij - 1.0) * std::pow(s[j], aij) *
             std::pow(s[i], bij - 2.0);
      h(i, j) = 2.0 * c.d(i, j) * bij * aij * std::pow(s[j], aij - 1.0) *
                std::pow(s[i], bij - 1.0);
    }
    h(i, i) = hii;
  }
  return h;
}

Bracket bracket(const CouplingData& c) {
  constexpr double eta = 1e-3;
  const double inv = 1.0 / (c.p - 2.0);
  double r = std::numeric_limits<double>::infinity();
  double R = 0.0;
  for (int i = 0; i < c.M; ++i) {
    double cross = 0.0;
    for (int j = 0; j < c.M; ++j) {
      if (j != i) cross += c.d(i, j) * c.beta(i, j);
    }
    const double denom = c.p * c.b[i] - 2.0 * cross;
    if (!(denom > 0.0)) {
      throw Infeasible("bracket: p*b_i <= 2*sum d_ij*beta_ij");
    }
    r = std::min(r, std::pow(2.0 * c.a[i] / (c.p * c.b[i]), inv));
    R = std::max(R, std::pow(2.0 * c.a[i] / denom, inv));
  }
  return Bracket{(1.0 - eta) * r, (1.0 + eta) * R};
}

namespace {

VectorXd clamp_box(VectorXd s, double lo, double hi) {
  for (int i = 0; i < s.size(); ++i) s[i] = std::clamp(s[i], lo, hi);
  return s;
}

CriticalPoint finish(const CouplingData& c, const VectorXd& s, int iters,
                     MaximizeStatus st) {
  CriticalPoint out;
  out.s = s;
  out.value = eval_J(c, s);
  out.grad_norm = grad_J(c, s).lpNorm<Eigen::Infinity>();
  out.iterations = iters;
  out.status = st;
  out.converged = (st == MaximizeStatus::Converged);
  return out;
}

// Backtracking ascent along d from s, clamped to [lo,hi]^M.
// Returns the accepted point, or s unchanged if no increase was found.
VectorXd line_search(const CouplingData& c, const VectorXd& s,
                     const VectorXd& g, const VectorXd& d, double lo,
                     double hi, bool& accepted) {
  const double j0 = eval_J(c, s);
  double t = 1.0;
  for (int k = 0; k < 60; ++k) {
    VectorXd cand = clamp_box(s + t * d, lo, hi);
    const VectorXd step = cand - s;
    const double slope = g.dot(step);
    if (step.lpNorm<Eigen::Infinity>() > 0.0 &&
        eval_J(c, cand) >= j0 + 1e-4 * slope && slope > 0.0) {
      accepted = true;
      return cand;
    }
    t *= 0.5;
  }
  accepted = false;
  return s;
}

}  // namespace

CriticalPoint maximize(const CouplingData& c, double tol, int max_iter) {
  c.validate();

  double lo, hi;
  bool boxed = c.feasible();
  if (boxed) {
    const Bracket br = bracket(c);
    lo = br.r;
    hi = br.R;
  } else {
    // No confinement available; attempt ascent on a very wide box and
    // report escape to its boundary as absence of an interior critical point.
    lo = 1e-8;
    hi = 1e8;
  }

  // Decoupled stationarity gives a good starting point.
  VectorXd s(c.M);
  for (int i = 0; i < c.M; ++i) {
    s[i] = std::pow(2.0 * c.a[i] / (c.p * c.b[i]), 1.0 / (c.p - 2.0));
  }
  s = clamp_box(s, lo, hi);

  const auto grad_scale = [&](const VectorXd& v) {
    double sc = 0.0;
    for (int i = 0; i < c.M; ++i) sc = std::max(sc, 2.0 * c.a[i] * v[i]);
    return 1.0 + sc;
  };

  for (int it = 0; it < max_iter; ++it) {
    const VectorXd g = grad_J(c, s);
    // tol is relative to the natural gradient scale; an absolute test is
    // unreachable when the coefficients are large.
    if (g.lpNorm<Eigen::Infinity>() <= tol * grad_scale(s)) {
      return finish(c, s, it, MaximizeStatus::Converged);
    }

    // Newton step where -H is positive definite, gradient ascent otherwise.
    VectorXd dir = g;
    bool newton = false;
    Eigen::LLT<MatrixXd> llt((-hess_J(c, s)).eval());
    if (llt.info() == Eigen::Success) {
      dir = llt.solve(g);
      newton = true;
    }

    if (newton) {
      // A full Newton step that stays in the box and shrinks the gradient is
      // accepted outright; the value-based test below loses to rounding noise
      // once |g| is small.
      const VectorXd cand = s + dir;
      if (cand.minCoeff() > lo && cand.maxCoeff() < hi &&
          grad_J(c, cand).lpNorm<Eigen::Infinity>() <
              0.9 * g.lpNorm<Eigen::Infinity>()) {
        s = cand;
        continue;
      }
    }

    bool accepted = false;
    VectorXd next = line_search(c, s, g, dir, lo, hi, accepted);
    if (!accepted && newton) {
      next = line_search(c, s, g, g, lo, hi, accepted);
    }
    if (!accepted) {
      // Rounding floor: no step can improve J any further in double
      // precision. Treat a gradient at relative machine scale as converged.
      if (boxed &&
          g.lpNorm<Eigen::Infinity>() <= 1e-10 * grad_scale(s)) {
        return finish(c, s, it, MaximizeStatus::Converged);
      }
      return finish(c, s, it,
                    boxed ? MaximizeStatus::IterationLimit
                          : MaximizeStatus::NoInteriorCriticalPoint);
    }
    s = next;

    if (!boxed &&
        (s.maxCoeff() >= hi * (1.0 - 1e-9) || s.minCoeff() <= lo * (1.0 + 1e-9))) {
      return finish(c, s, it, MaximizeStatus::NoInteriorCriticalPoint);
    }
  }
  return finish(c, s, max_iter,
                boxed ? MaximizeStatus::IterationLimit
                      : MaximizeStatus::NoInteriorCriticalPoint);
}

VectorXd brute_force_max(const CouplingData& c, double lo, double hi, int n,
                         std::int64_t budget) {
  c.validate();
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw DomainError("brute_force_max: need 0 < lo < hi and n >= 2");
  }
  if (c.M > 4) throw CostGuard("brute_force_max: M > 4");
  std::int64_t total = 1;
  for (int i = 0; i < c.M; ++i) {
    total *= n;
    if (total > budget) throw CostGuard("brute_force_max: n^M over budget");
  }

  VectorXd grid(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int k = 0; k < n; ++k) {
    grid[k] = std::exp(llo + (lhi - llo) * k / (n - 1));
  }

  VectorXd best;
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(c.M, 0);
  VectorXd s(c.M);
  for (std::int64_t step = 0; step < total; ++step) {
    for (int i = 0; i < c.M; ++i) s[i] = grid[idx[i]];
    const double v = eval_J(c, s);
    if (v > best_val) {
      best_val = v;
      best = s;
    }
    for (int i = 0; i < c.M; ++i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }
  return best;
}

}  // namespace nehari
