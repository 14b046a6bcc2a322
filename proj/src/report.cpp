#include "nehari/report.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace nehari {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

void emit(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      out += j.dump();
      break;
    case json::value_t::number_float:
      out += fmt(j.get<double>());
      break;
    case json::value_t::string:
      out += j.dump();
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        emit(e, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      out += "null";
  }
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string status_name(SolveStatus st) {
  switch (st) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::BoundaryEscape: return "boundary_escape";
    case SolveStatus::IterLimit: return "iter_limit";
  }
  return "iter_limit";
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  out << bytes;
}

}  // namespace

std::string emit_json(const json& j) {
  std::string out;
  emit(j, out);
  out += '\n';
  return out;
}

std::string profile_csv(const FunctionTuple& u) {
  std::string out = "r";
  for (int i = 1; i <= u.M(); ++i) out += ",u" + std::to_string(i);
  out += '\n';
  const Space& sp = *u.space;
  for (int k = 0; k < sp.size(); ++k) {
    out += fmt(sp.nodes[k]);
    for (int i = 0; i < u.M(); ++i) out += ',' + fmt(u.comp[i][k]);
    out += '\n';
  }
  return out;
}

json report_of(const SolveReport& r, const RunConfig& cfg) {
  json j;
  j["status"] = status_name(r.status);
  j["energy"] = r.solution.energy;
  j["psi"] = r.psi_value;
  j["s"] = to_json(r.solution.s);
  j["grad_norm"] = r.grad_norm;
  j["component_norms"] = to_json(r.component_norms);
  j["residuals"] = to_json(r.solution.residuals);
  j["iterations"] = r.iterations;
  j["positive"] = r.positive;
  j["seed_index"] = r.seed_index;
  j["preset"] = cfg.preset;
  j["grid_n"] = cfg.grid_n;
  return j;
}

namespace {

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

CouplingData random_coupling(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CouplingData c;
  c.M = 1 + static_cast<int>(unif(rng) * 3.0);
  if (c.M > 3) c.M = 3;
  c.p = 2.2 + 2.8 * unif(rng);
  c.a = VectorXd::NullaryExpr(c.M, [&](int) { return 0.2 + 1.8 * unif(rng); });
  c.b = VectorXd::NullaryExpr(c.M, [&](int) { return 0.2 + 1.8 * unif(rng); });
  c.d = MatrixXd::Zero(c.M, c.M);
  c.alpha = MatrixXd::Zero(c.M, c.M);
  c.beta = MatrixXd::Zero(c.M, c.M);
  for (int i = 0; i < c.M; ++i) {
    for (int j = i + 1; j < c.M; ++j) {
      const double aij = 1.0 + (c.p - 2.0) * (0.1 + 0.8 * unif(rng));
      c.alpha(i, j) = aij;
      c.beta(i, j) = c.p - aij;
      c.alpha(j, i) = c.beta(i, j);
      c.beta(j, i) = aij;
      c.d(i, j) = c.d(j, i) = unif(rng);
    }
  }
  if (c.M > 1) {
    // Rescale the couplings so p b_i > 2 sum_j d_ij beta_ij holds strictly.
    double worst = 0.0;
    for (int i = 0; i < c.M; ++i) {
      double coupling = 0.0;
      for (int j = 0; j < c.M; ++j) {
        if (j != i) coupling += 2.0 * c.d(i, j) * c.beta(i, j);
      }
      worst = std::max(worst, coupling / (c.p * c.b[i]));
    }
    if (worst > 0.0) c.d *= 0.7 * unif(rng) / worst;
  }
  c.validate();
  return c;
}

std::vector<Check> verify_suite(const RunConfig& cfg) {
  std::vector<Check> checks;
  std::mt19937_64 rng(cfg.solver.rng_seed + 17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  {
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      const CouplingData c = random_coupling(rng);
      const CriticalPoint cp = maximize(c);
      if (!cp.converged) {
        ok = false;
        detail = "maximize did not converge";
        break;
      }
      const Bracket br = bracket(c);
      double lo = br.r, hi = br.R;
      VectorXd bf;
      int n = 60;
      for (int refine = 0; refine < 3; ++refine) {
        bf = brute_force_max(c, lo, hi, n);
        const double cell = std::pow(hi / lo, 1.0 / (n - 1));
        lo = bf.minCoeff() / cell;
        hi = bf.maxCoeff() * cell;
      }
      const double cell = std::pow(hi / lo, 1.0 / 59.0);
      for (int i = 0; i < c.M; ++i) {
        if (std::abs(std::log(cp.s[i] / bf[i])) > std::log(cell) * 1.5) {
          ok = false;
          detail = "argmax off the refined lattice cell";
        }
      }
    }
    checks.push_back({"inner_maximize_vs_lattice", ok, detail});
  }

  {
    bool ok = true;
    for (int trial = 0; trial < 10 && ok; ++trial) {
      const CouplingData c = random_coupling(rng);
      const CriticalPoint ref = maximize(c);
      const Bracket br = bracket(c);
      for (int start = 0; start < 8; ++start) {
        CouplingData shifted = c;  // same data, different start via scaling
        const double f = std::exp((unif(rng) - 0.5) * 2.0);
        shifted.a *= f * f;  // J_{fu}(s) = J_u(fs): maximizer scales by 1/f
        for (int i = 0; i < c.M; ++i) shifted.b[i] *= std::pow(f, c.p);
        for (int i = 0; i < c.M; ++i) {
          for (int j = 0; j < c.M; ++j) {
            if (i != j) shifted.d(i, j) *= std::pow(f, c.p);
          }
        }
        const CriticalPoint cp = maximize(shifted);
        if (!cp.converged ||
            (cp.s * f - ref.s).lpNorm<Eigen::Infinity>() >
                1e-8 * (1.0 + ref.s.lpNorm<Eigen::Infinity>())) {
          ok = false;
        }
      }
      (void)br;
    }
    checks.push_back({"inner_maximizer_scaling_consistency", ok, ""});
  }

  {
    bool ok = true;
    for (int trial = 0; trial < 10 && ok; ++trial) {
      const CouplingData c = random_coupling(rng);
      const Bracket br = bracket(c);
      VectorXd s = VectorXd::NullaryExpr(
          c.M, [&](int) { return br.r + (br.R - br.r) * unif(rng); });
      const VectorXd g = grad_J(c, s);
      for (int i = 0; i < c.M; ++i) {
        const double h = 1e-6 * s[i];
        VectorXd sp = s, sm = s;
        sp[i] += h;
        sm[i] -= h;
        const double fd = (eval_J(c, sp) - eval_J(c, sm)) / (2.0 * h);
        if (std::abs(fd - g[i]) > 1e-6 * (1.0 + std::abs(g[i]))) ok = false;
      }
    }
    checks.push_back({"inner_gradient_fd", ok, ""});
  }

  try {
    const Preset pr = make_preset(cfg);
    EnergyModel model(pr.spec, pr.space);
    const auto seeds = genus_seeds(model, 1);
    const FunctionTuple& u = seeds.front();
    const NehariPoint np = model.project_nehari(u);

    bool ok = std::abs(model.psi(u) - model.energy(np.tuple)) <=
              1e-8 * (1.0 + std::abs(np.energy));
    const FunctionTuple back = model.normalize_to_torus(np.tuple);
    for (int i = 0; i < model.spec().M; ++i) {
      ok = ok && model.norm_i(i, back.comp[i] - u.comp[i]) < 1e-10;
    }
    checks.push_back({"projection_identities", ok, ""});

    const FunctionTuple g = model.psi_gradient(u, np);
    FunctionTuple v;
    v.space = pr.space;
    for (int i = 0; i < model.spec().M; ++i) {
      VectorXd w = VectorXd::NullaryExpr(pr.space->size(),
                                         [&](int) { return unif(rng) - 0.5; });
      pr.space->apply_mask(w);
      w -= model.inner(i, w, u.comp[i]) * u.comp[i];
      v.comp.push_back(w / model.norm_i(i, w));
    }
    const double h = 1e-5;
    const double fd =
        (model.psi(retract(model, u, v, h)) -
         model.psi(retract(model, u, v, -h))) /
        (2.0 * h);
    double gv = 0.0;
    for (int i = 0; i < model.spec().M; ++i) {
      gv += model.inner(i, g.comp[i], v.comp[i]);
    }
    ok = std::abs(fd - gv) <= 1e-4 * (1.0 + std::abs(gv));
    checks.push_back({"psi_gradient_fd", ok, ""});
  } catch (const Error& e) {
    checks.push_back({"projection_identities", false, e.what()});
  }

  {
    json probe;
    probe["x"] = 0.1 + 0.2;
    probe["v"] = std::vector<double>{1.0 / 3.0, 2e-13};
    const bool ok = emit_json(probe) == emit_json(probe);
    checks.push_back({"report_determinism", ok, ""});
  }
  return checks;
}

int run_mode(const RunConfig& cfg, const std::string& out_dir,
             const std::string& format) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const bool want_json = format == "json" || format == "both";
  const bool want_csv = format == "csv" || format == "both";

  if (cfg.mode == "verify") {
    const auto checks = verify_suite(cfg);
    json rep;
    rep["preset"] = cfg.preset;
    rep["grid_n"] = cfg.grid_n;
    json list = json::array();
    bool all = true;
    for (const auto& c : checks) {
      std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name
                << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
      all = all && c.passed;
      list.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"detail", c.detail}});
    }
    rep["checks"] = list;
    rep["all_passed"] = all;
    if (want_json) write_file(dir / "report.json", emit_json(rep));
    return all ? 0 : 4;
  }

  if (cfg.mode == "bubble-scan") {
    const Preset pr = make_preset(cfg);
    const BubbleScan scan = bubble_scan(pr.space, cfg.bubble.mu,
                                        cfg.bubble.cutoff, cfg.bubble.eps,
                                        cfg.bubble.betas);
    json rep;
    rep["preset"] = cfg.preset;
    rep["grid_n"] = cfg.grid_n;
    rep["eps"] = scan.eps;
    rep["grad_norm2"] = scan.grad_norm2;
    rep["crit_norm"] = scan.crit_norm;
    rep["l2_norm2"] = scan.l2_norm2;
    rep["limit_grad_norm2"] = scan.limit_grad_norm2;
    rep["slope_defect"] = scan.slope_defect;
    rep["slope_l2"] = scan.slope_l2;
    rep["n4_residual_log"] = scan.n4_residual_log;
    rep["n4_residual_plain"] = scan.n4_residual_plain;
    json slopes;
    json norms;
    for (const auto& [b, sl] : scan.slope_beta) slopes[fmt(b)] = sl;
    for (const auto& [b, vals] : scan.beta_norms) norms[fmt(b)] = vals;
    rep["slope_beta"] = slopes;
    rep["beta_norms"] = norms;
    if (want_json) write_file(dir / "report.json", emit_json(rep));
    return 0;
  }

  const Preset pr = make_preset(cfg);
  EnergyModel model(pr.spec, pr.space);

  if (cfg.mode == "solve") {
    const SolveReport r =
        minimize_psi(model, genus_seeds(model, 1).front(), cfg.solver);
    if (want_json) {
      write_file(dir / "report.json", emit_json(report_of(r, cfg)));
    }
    if (want_csv) {
      write_file(dir / "profile_0.csv", profile_csv(r.solution.tuple));
    }
    return r.status == SolveStatus::Converged ? 0 : 3;
  }

  // multistart
  const auto runs = multistart(model, cfg.k, cfg.solver);
  json rep;
  rep["preset"] = cfg.preset;
  rep["grid_n"] = cfg.grid_n;
  rep["count"] = static_cast<int>(runs.size());
  json list = json::array();
  for (const auto& r : runs) list.push_back(report_of(r, cfg));
  rep["runs"] = list;
  if (want_json) write_file(dir / "report.json", emit_json(rep));
  if (want_csv) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      write_file(dir / ("profile_" + std::to_string(i) + ".csv"),
                 profile_csv(runs[i].solution.tuple));
    }
  }
  return runs.empty() ? 3 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"variational solver for weakly coupled competitive systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format = "json";
  int threads = 0;
  long long seed = -1;
  for (const char* name : {"solve", "multistart", "verify", "bubble-scan"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path)->required();
    sub->add_option("--out", out_dir);
    sub->add_option("--format", format)
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_option("--threads", threads);
    sub->add_option("--seed", seed);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << '\n';
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config(buf.str());
    cfg.mode = app.get_subcommands().front()->get_name();
    if (threads > 0) cfg.solver.threads = threads;
    if (seed >= 0) cfg.solver.rng_seed = static_cast<std::uint64_t>(seed);
    return run_mode(cfg, out_dir, format);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SignError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CoercivityViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidStart& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace nehari
