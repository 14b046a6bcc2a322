#include "nehari/descent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <numbers>

namespace nehari {

FunctionTuple retract(const EnergyModel& model, const FunctionTuple& u,
                      const FunctionTuple& v, double t) {
  FunctionTuple out;
  out.space = u.space;
  out.comp.resize(u.M());
  for (int i = 0; i < u.M(); ++i) {
    VectorXd w = u.comp[i] + t * v.comp[i];
    const double n = model.norm_i(i, w);
    if (!(n > 0.0)) {
      throw TrivialComponent("retract: degenerate component " +
                             std::to_string(i));
    }
    out.comp[i] = w / n;
  }
  return out;
}

namespace {

bool sign_definite(const FunctionTuple& u) {
  for (const VectorXd& c : u.comp) {
    const double scale = c.lpNorm<Eigen::Infinity>();
    if (c.minCoeff() < -1e-8 * scale && c.maxCoeff() > 1e-8 * scale) {
      return false;
    }
  }
  return true;
}

SolveReport make_report(const EnergyModel& model, SolveStatus st,
                        const FunctionTuple& u, const NehariPoint& np,
                        double gnorm, int iters) {
  SolveReport r;
  r.status = st;
  r.solution = np;
  r.torus_point = u;
  r.psi_value = model.psi(np);
  r.grad_norm = gnorm;
  r.iterations = iters;
  r.positive = sign_definite(np.tuple);
  r.component_norms = np.s;
  return r;
}

}  // namespace

SolveReport minimize_psi(const EnergyModel& model, const FunctionTuple& u0,
                         const DescentConfig& cfg) {
  FunctionTuple u;
  NehariPoint np;
  try {
    u = model.normalize_to_torus(u0);
    np = model.project_nehari(u);
  } catch (const Error& e) {
    throw InvalidStart(std::string("minimize_psi: start not in U: ") +
                       e.what());
  }
  double psi = model.psi(np);

  // Non-monotone reference window for the Armijo test.
  std::deque<double> window{psi};
  FunctionTuple prev_u, prev_g;
  double t_init = 0.0;

  for (int it = 0; it <= cfg.max_iter; ++it) {
    const FunctionTuple g = model.psi_gradient(u, np);
    const double gnorm = model.tangent_norm(g);
    if (gnorm <= cfg.tol_grad) {
      return make_report(model, SolveStatus::Converged, u, np, gnorm, it);
    }
    if (np.s.maxCoeff() > cfg.s_cap) {
      return make_report(model, SolveStatus::BoundaryEscape, u, np, gnorm, it);
    }
    if (it == cfg.max_iter) break;

    // Barzilai-Borwein step length from the previous displacement.
    double t = cfg.armijo.t0 / std::max(1.0, gnorm);
    if (prev_u.M() > 0) {
      double uu = 0.0, ug = 0.0;
      for (int i = 0; i < u.M(); ++i) {
        const VectorXd du = u.comp[i] - prev_u.comp[i];
        const VectorXd dg = g.comp[i] - prev_g.comp[i];
        uu += model.inner(i, du, du);
        ug += model.inner(i, du, dg);
      }
      if (ug > 0.0) t = std::clamp(uu / ug, 1e-12, 1e6);
    }
    (void)t_init;

    FunctionTuple dir;
    dir.space = u.space;
    dir.comp.resize(u.M());
    for (int i = 0; i < u.M(); ++i) dir.comp[i] = -g.comp[i];

    const double ref = *std::max_element(window.begin(), window.end());
    bool accepted = false;
    while (t > 1e-16) {
      FunctionTuple cand = retract(model, u, dir, t);
      NehariPoint cand_np;
      try {
        cand_np = model.project_nehari(cand);
      } catch (const NotInU&) {
        // Trial step overshot into the boundary region of U; shrink.
        t *= cfg.armijo.shrink;
        continue;
      }
      const double cand_psi = model.psi(cand_np);
      bool take = cand_psi <= ref - cfg.armijo.c1 * t * gnorm * gnorm;
      // Near the minimum the certified decrease drops below the rounding
      // noise of Psi; fall back to accepting steps that shrink the gradient.
      const double noise = 1e-12 * (1.0 + std::abs(psi));
      if (!take && cfg.armijo.c1 * t * gnorm * gnorm < noise &&
          cand_psi <= psi + noise) {
        const FunctionTuple cg = model.psi_gradient(cand, cand_np);
        take = model.tangent_norm(cg) <= (1.0 - 1e-3) * gnorm;
      }
      if (take) {
        prev_u = std::move(u);
        prev_g = g;
        u = std::move(cand);
        np = std::move(cand_np);
        psi = cand_psi;
        window.push_back(psi);
        if (window.size() > 8) window.pop_front();
        accepted = true;
        break;
      }
      t *= cfg.armijo.shrink;
    }
    if (!accepted) {
      return make_report(model, SolveStatus::IterLimit, u, np, gnorm, it);
    }
  }
  const FunctionTuple g = model.psi_gradient(u, np);
  return make_report(model, SolveStatus::IterLimit, u, np,
                     model.tangent_norm(g), cfg.max_iter);
}

namespace {

// Bump supported on (a,b): sin^2 of the normalized coordinate.
VectorXd bump_on(const Space& sp, double a, double b) {
  VectorXd v = VectorXd::Zero(sp.size());
  int inside = 0;
  for (int k = 0; k < sp.size(); ++k) {
    const double x = sp.nodes[k];
    if (x <= a || x >= b) continue;
    const double s = (x - a) / (b - a);
    const double w = std::sin(std::numbers::pi * s);
    v[k] = w * w;
    ++inside;
  }
  if (inside < 8) throw ResolutionTooCoarse("bump support has < 8 nodes");
  VectorXd masked = v;
  sp.apply_mask(masked);
  return masked;
}

std::pair<double, double> coordinate_range(const Space& sp) {
  return {sp.nodes[0], sp.nodes[sp.size() - 1]};
}

}  // namespace

std::vector<FunctionTuple> genus_seeds(const EnergyModel& model, int k,
                                       std::uint64_t /*rng_seed*/,
                                       bool with_mixture) {
  if (k < 1) throw DomainError("genus_seeds: k < 1");
  const Space& sp = *model.space();
  const int M = model.spec().M;
  const auto [lo, hi] = coordinate_range(sp);
  const int slots = k * M;
  const double w = (hi - lo) / slots;
  const double gap = 0.05 * w;

  // bumps[j][i]: row j of the disjoint-support family. The slot assignment
  // is cyclically shifted per row so different seeds order the components
  // differently; distinct orderings can sit in distinct descent basins.
  std::vector<std::vector<VectorXd>> bumps(k, std::vector<VectorXd>(M));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < M; ++i) {
      const int slot = j * M + (i + j) % M;
      bumps[j][i] = bump_on(sp, lo + slot * w + gap, lo + (slot + 1) * w - gap);
    }
  }

  std::vector<FunctionTuple> seeds;
  seeds.reserve(k);
  for (int j = 0; j < k; ++j) {
    FunctionTuple t;
    t.space = model.space();
    t.comp = bumps[j];
    if (with_mixture && j == k - 1 && k >= 2) {
      // Interior simplex point (e_{k-2} - e_{k-1})/2: sign-changing
      // two-bump components, supports still disjoint across i.
      for (int i = 0; i < M; ++i) t.comp[i] = bumps[k - 2][i] - bumps[k - 1][i];
    }
    seeds.push_back(model.normalize_to_torus(t));
  }
  return seeds;
}

namespace {

bool duplicates(const EnergyModel& model, const SolveReport& a,
                const SolveReport& b, double tol) {
  if (std::abs(a.psi_value - b.psi_value) >=
      tol * (1.0 + std::abs(a.psi_value))) {
    return false;
  }
  // Distance after the optimal componentwise sign flip (J is even per
  // component).
  double dist2 = 0.0;
  for (int i = 0; i < a.torus_point.M(); ++i) {
    const VectorXd& ui = a.torus_point.comp[i];
    const VectorXd& vi = b.torus_point.comp[i];
    const double dm = std::min(model.norm_i(i, ui - vi),
                               model.norm_i(i, ui + vi));
    dist2 += dm * dm;
  }
  return std::sqrt(dist2) < tol * std::sqrt(double(a.torus_point.M()));
}

}  // namespace

std::vector<SolveReport> multistart(const EnergyModel& model,
                                    const std::vector<FunctionTuple>& seeds,
                                    const DescentConfig& cfg) {
  std::vector<SolveReport> runs(seeds.size());
  std::vector<bool> ok(seeds.size(), false);

  auto solve_one = [&](int idx) {
    try {
      runs[idx] = minimize_psi(model, seeds[idx], cfg);
      runs[idx].seed_index = idx;
      ok[idx] = (runs[idx].status == SolveStatus::Converged);
    } catch (const Error&) {
      ok[idx] = false;
    }
  };

  if (cfg.threads > 1) {
    std::vector<std::future<void>> futs;
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
      futs.push_back(std::async(std::launch::async, solve_one, i));
    }
    for (auto& f : futs) f.get();
  } else {
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) solve_one(i);
  }

  std::vector<SolveReport> converged;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (ok[i]) converged.push_back(std::move(runs[i]));
  }
  std::sort(converged.begin(), converged.end(),
            [](const SolveReport& a, const SolveReport& b) {
              if (a.psi_value != b.psi_value) return a.psi_value < b.psi_value;
              return a.seed_index < b.seed_index;
            });

  std::vector<SolveReport> distinct;
  for (auto& r : converged) {
    bool dup = false;
    for (const auto& kept : distinct) {
      if (duplicates(model, kept, r, cfg.dedup_tol)) {
        dup = true;
        break;
      }
    }
    if (!dup) distinct.push_back(std::move(r));
  }

  if (!distinct.empty() && !distinct.front().positive) {
    // Re-solve the least-energy solution from |u| for a positive candidate.
    FunctionTuple absu;
    absu.space = model.space();
    for (const VectorXd& c : distinct.front().solution.tuple.comp) {
      absu.comp.push_back(c.cwiseAbs());
    }
    try {
      SolveReport pos = minimize_psi(model, absu, cfg);
      pos.seed_index = distinct.front().seed_index;
      if (pos.status == SolveStatus::Converged &&
          pos.psi_value <=
              distinct.front().psi_value +
                  cfg.dedup_tol * (1.0 + std::abs(distinct.front().psi_value))) {
        distinct.front() = std::move(pos);
      }
    } catch (const Error&) {
      // keep the original least-energy report
    }
  }
  return distinct;
}

std::vector<SolveReport> multistart(const EnergyModel& model, int k,
                                    const DescentConfig& cfg) {
  return multistart(model, genus_seeds(model, k, cfg.rng_seed, k >= 3), cfg);
}

}  // namespace nehari
