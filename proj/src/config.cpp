#include "nehari/config.hpp"

#include <json.hpp>

namespace nehari {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw DomainError("config: " + path + ": " + what);
}

const json& at(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
  return j[key];
}

double num(const json& j, const std::string& key, const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& key, double dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  if (!j[key].is_number()) fail(key, "expected a number");
  return j[key].get<double>();
}

int integer(const json& j, const std::string& key, const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

VectorXd vec(const json& j, const std::string& key, int M,
             const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_array() || static_cast<int>(v.size()) != M) {
    fail(path + "." + key, "expected an array of length " + std::to_string(M));
  }
  VectorXd out(M);
  for (int i = 0; i < M; ++i) {
    if (!v[i].is_number()) fail(path + "." + key, "non-numeric entry");
    out[i] = v[i].get<double>();
  }
  return out;
}

MatrixXd mat(const json& j, const std::string& key, int M,
             const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_array() || static_cast<int>(v.size()) != M) {
    fail(path + "." + key, "expected an MxM array");
  }
  MatrixXd out(M, M);
  for (int r = 0; r < M; ++r) {
    if (!v[r].is_array() || static_cast<int>(v[r].size()) != M) {
      fail(path + "." + key, "row " + std::to_string(r) + " has wrong length");
    }
    for (int c = 0; c < M; ++c) {
      if (!v[r][c].is_number()) fail(path + "." + key, "non-numeric entry");
      out(r, c) = v[r][c].get<double>();
    }
  }
  return out;
}

std::vector<double> dlist(const json& j, const std::string& key,
                          const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(path + "." + key, "non-numeric entry");
    out.push_back(e.get<double>());
  }
  return out;
}

DomainKind kind_of(const std::string& s, const std::string& path) {
  if (s == "ball") return DomainKind::Ball;
  if (s == "exterior") return DomainKind::ExteriorRadial;
  if (s == "sphere") return DomainKind::SphereAngular;
  fail(path, "unknown domain kind '" + s + "'");
}

std::string kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::Ball: return "ball";
    case DomainKind::ExteriorRadial: return "exterior";
    case DomainKind::SphereAngular: return "sphere";
  }
  return "ball";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: not valid JSON: ") + e.what());
  }

  RunConfig c;
  c.preset = at(j, "preset", "").get<std::string>();
  if (c.preset != "exterior" && c.preset != "yamabe" &&
      c.preset != "brezis_nirenberg" && c.preset != "custom") {
    fail("preset", "unknown preset '" + c.preset + "'");
  }

  const json& sys = at(j, "system", "");
  const int M = integer(sys, "M", "system");
  if (M < 1) fail("system.M", "must be at least 1");
  c.system.M = M;
  c.system.mu = vec(sys, "mu", M, "system");
  c.system.lambda = mat(sys, "lambda", M, "system");
  c.system.alpha = mat(sys, "alpha", M, "system");
  c.system.beta = mat(sys, "beta", M, "system");

  const json& dom = at(j, "domain", "");
  c.grid_n = integer(dom, "n", "domain");
  if (c.grid_n < 16) fail("domain.n", "grid too small");

  if (c.preset == "yamabe") {
    c.system.domain.kind = DomainKind::SphereAngular;
    c.system.domain.m = integer(dom, "m", "domain");
    c.system.domain.n_factor = integer(dom, "n_factor", "domain");
    c.system.N = c.system.domain.m + c.system.domain.n_factor - 1;
    c.system.domain.dim = c.system.N;
    c.system.p = c.system.critical_exponent();
    c.system.kappa =
        VectorXd::Constant(M, c.system.N * (c.system.N - 2.0) / 4.0);
  } else {
    c.system.N = integer(sys, "N", "system");
    c.system.kappa = vec(sys, "kappa", M, "system");
    if (c.preset == "brezis_nirenberg") {
      c.system.domain.kind = DomainKind::Ball;
      c.system.domain.radius = num(dom, "radius", "domain");
      c.system.p = c.system.critical_exponent();
    } else if (c.preset == "exterior") {
      c.system.domain.kind = DomainKind::ExteriorRadial;
      c.system.domain.hole_radius = num(dom, "hole_radius", "domain");
      c.system.domain.truncation = num(dom, "truncation", "domain");
      c.system.p = num(sys, "p", "system");
    } else {
      c.system.domain.kind =
          kind_of(at(dom, "kind", "domain").get<std::string>(), "domain.kind");
      c.system.domain.radius = num_or(dom, "radius", 1.0);
      c.system.domain.hole_radius = num_or(dom, "hole_radius", 0.0);
      c.system.domain.truncation = num_or(dom, "truncation", 0.0);
      c.system.domain.m = static_cast<int>(num_or(dom, "m", 0));
      c.system.domain.n_factor = static_cast<int>(num_or(dom, "n_factor", 0));
      c.system.p = num(sys, "p", "system");
    }
    c.system.domain.dim = c.system.N;
  }

  if (j.contains("solver")) {
    const json& so = j["solver"];
    c.solver.tol_grad = num_or(so, "tol_grad", c.solver.tol_grad);
    c.solver.max_iter =
        static_cast<int>(num_or(so, "max_iter", c.solver.max_iter));
    c.solver.s_cap = num_or(so, "s_cap", c.solver.s_cap);
    c.solver.rng_seed =
        static_cast<std::uint64_t>(num_or(so, "seed", 0.0));
    c.solver.dedup_tol = num_or(so, "dedup_tol", c.solver.dedup_tol);
    c.solver.threads = static_cast<int>(num_or(so, "threads", 1));
    if (so.contains("armijo")) {
      const json& ar = so["armijo"];
      c.solver.armijo.c1 = num_or(ar, "c1", c.solver.armijo.c1);
      c.solver.armijo.shrink = num_or(ar, "shrink", c.solver.armijo.shrink);
      c.solver.armijo.t0 = num_or(ar, "t0", c.solver.armijo.t0);
    }
  }

  if (j.contains("run")) {
    const json& run = j["run"];
    if (run.contains("mode")) c.mode = run["mode"].get<std::string>();
    c.k = static_cast<int>(num_or(run, "k", 1));
    if (run.contains("bubble")) {
      const json& bb = run["bubble"];
      c.bubble.mu = num_or(bb, "mu", 1.0);
      c.bubble.cutoff = num_or(bb, "cutoff", 0.5);
      c.bubble.eps = dlist(bb, "eps", "run.bubble");
      c.bubble.betas = dlist(bb, "betas", "run.bubble");
    }
  }
  if (c.mode != "solve" && c.mode != "multistart" && c.mode != "verify" &&
      c.mode != "bubble-scan") {
    fail("run.mode", "unknown mode '" + c.mode + "'");
  }
  if (c.k < 1) fail("run.k", "must be at least 1");

  for (int i = 0; i < M; ++i) {
    if (!(c.system.mu[i] > 0.0)) {
      fail("system.mu", "entry " + std::to_string(i) + " must be positive");
    }
    for (int jj = i + 1; jj < M; ++jj) {
      const std::string at_ij =
          " at (" + std::to_string(i) + "," + std::to_string(jj) + ")";
      if (c.system.lambda(i, jj) != c.system.lambda(jj, i)) {
        fail("system.lambda", "not symmetric" + at_ij);
      }
      if (!(c.system.lambda(i, jj) < 0.0)) {
        fail("system.lambda", "must be negative" + at_ij);
      }
      if (c.system.alpha(i, jj) != c.system.beta(jj, i) ||
          c.system.alpha(jj, i) != c.system.beta(i, jj)) {
        fail("system.alpha", "alpha_ij must equal beta_ji" + at_ij);
      }
    }
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["preset"] = c.preset;

  json sys;
  sys["M"] = c.system.M;
  sys["N"] = c.system.N;
  sys["p"] = c.system.p;
  sys["kappa"] = std::vector<double>(c.system.kappa.data(),
                                     c.system.kappa.data() + c.system.M);
  sys["mu"] = std::vector<double>(c.system.mu.data(),
                                  c.system.mu.data() + c.system.M);
  const auto matrix = [&](const MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < c.system.M; ++r) {
      json row = json::array();
      for (int cc = 0; cc < c.system.M; ++cc) row.push_back(m(r, cc));
      rows.push_back(row);
    }
    return rows;
  };
  sys["lambda"] = matrix(c.system.lambda);
  sys["alpha"] = matrix(c.system.alpha);
  sys["beta"] = matrix(c.system.beta);
  j["system"] = sys;

  json dom;
  dom["n"] = c.grid_n;
  dom["kind"] = kind_name(c.system.domain.kind);
  switch (c.system.domain.kind) {
    case DomainKind::Ball:
      dom["radius"] = c.system.domain.radius;
      break;
    case DomainKind::ExteriorRadial:
      dom["hole_radius"] = c.system.domain.hole_radius;
      dom["truncation"] = c.system.domain.truncation;
      break;
    case DomainKind::SphereAngular:
      dom["m"] = c.system.domain.m;
      dom["n_factor"] = c.system.domain.n_factor;
      break;
  }
  j["domain"] = dom;

  json so;
  so["tol_grad"] = c.solver.tol_grad;
  so["max_iter"] = c.solver.max_iter;
  so["s_cap"] = c.solver.s_cap;
  so["seed"] = static_cast<double>(c.solver.rng_seed);
  so["dedup_tol"] = c.solver.dedup_tol;
  so["threads"] = c.solver.threads;
  so["armijo"] = {{"c1", c.solver.armijo.c1},
                  {"shrink", c.solver.armijo.shrink},
                  {"t0", c.solver.armijo.t0}};
  j["solver"] = so;

  json run;
  run["mode"] = c.mode;
  run["k"] = c.k;
  if (!c.bubble.eps.empty()) {
    run["bubble"] = {{"mu", c.bubble.mu},
                     {"cutoff", c.bubble.cutoff},
                     {"eps", c.bubble.eps},
                     {"betas", c.bubble.betas}};
  }
  j["run"] = run;
  return j.dump(2);
}

Preset make_preset(const RunConfig& c) {
  if (c.preset == "exterior") {
    return preset_exterior(c.system.N, c.system.domain.hole_radius,
                           c.system.domain.truncation, c.grid_n, c.system);
  }
  if (c.preset == "yamabe") {
    return preset_yamabe(c.system.domain.m, c.system.domain.n_factor, c.grid_n,
                         c.system.mu, c.system.lambda, c.system.alpha,
                         c.system.beta);
  }
  if (c.preset == "brezis_nirenberg") {
    return preset_brezis_nirenberg(c.system.N, c.system.domain.radius,
                                   c.grid_n, c.system.kappa, c.system.mu,
                                   c.system.lambda, c.system.alpha,
                                   c.system.beta);
  }
  Preset pr;
  pr.spec = c.system;
  pr.space = build_space(c.system.domain, c.grid_n);
  validate_spec(pr.spec, *pr.space);
  return pr;
}

}  // namespace nehari
