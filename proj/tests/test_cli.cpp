#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nehari/report.hpp"

using namespace nehari;
namespace fs = std::filesystem;

namespace {

const char* kBnConfig = R"({
  "preset": "brezis_nirenberg",
  "system": {
    "M": 2, "N": 4,
    "kappa": [-1.0, -1.0], "mu": [1.0, 1.0],
    "lambda": [[0, -0.5], [-0.5, 0]],
    "alpha": [[0, 2.0], [2.0, 0]],
    "beta": [[0, 2.0], [2.0, 0]]
  },
  "domain": {"radius": 1.0, "n": 300},
  "solver": {"tol_grad": 1e-6, "max_iter": 400, "seed": 0},
  "run": {"mode": "solve", "k": 1}
})";

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "nehari_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = temp_dir() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv = {"nehari-cli"};
  argv.insert(argv.end(), args);
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config round trip") {
  const RunConfig a = parse_config(kBnConfig);
  CHECK(a.preset == "brezis_nirenberg");
  CHECK(a.system.M == 2);
  CHECK(a.system.p == doctest::Approx(4.0));  // derived: 2* for N = 4
  CHECK(a.grid_n == 300);
  CHECK(a.mode == "solve");

  const std::string text = serialize_config(a);
  const RunConfig b = parse_config(text);
  CHECK(serialize_config(b) == text);
  CHECK(b.system.kappa[0] == a.system.kappa[0]);
  CHECK(b.solver.tol_grad == a.solver.tol_grad);
}

TEST_CASE("parse errors name the offending field") {
  // non-symmetric lambda
  std::string bad = kBnConfig;
  const auto pos = bad.find("[[0, -0.5], [-0.5, 0]]");
  bad.replace(pos, 22, "[[0, -0.5], [-0.7, 0]]");
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("lambda"),
                       DomainError);

  CHECK_THROWS_AS(parse_config("{not json"), DomainError);
  CHECK_THROWS_AS(parse_config("{}"), DomainError);

  // unknown preset
  std::string unk = kBnConfig;
  const auto p2 = unk.find("brezis_nirenberg");
  unk.replace(p2, 16, "whatever_preset0");
  CHECK_THROWS_WITH_AS(parse_config(unk), doctest::Contains("preset"),
                       DomainError);
}

TEST_CASE("emit_json is deterministic with fixed float format") {
  nlohmann::json j;
  j["b"] = 1.0 / 3.0;
  j["a"] = std::vector<double>{2e-13, 1.5};
  j["n"] = 7;
  const std::string s = emit_json(j);
  CHECK(s == emit_json(j));
  // keys sorted, floats as %.12e, integers untouched
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("3.333333333333e-01") != std::string::npos);
  CHECK(s.find("2.000000000000e-13") != std::string::npos);
  CHECK(s.find("7") != std::string::npos);
  CHECK(s.back() == '\n');
}

TEST_CASE("profile_csv header and shape") {
  DomainSpec dom;
  dom.kind = DomainKind::Ball;
  dom.dim = 3;
  dom.radius = 1.0;
  const SpacePtr sp = build_space(dom, 50);
  FunctionTuple u;
  u.space = sp;
  u.comp = {VectorXd::Ones(sp->size()), VectorXd::Zero(sp->size())};
  const std::string csv = profile_csv(u);
  CHECK(csv.rfind("r,u1,u2\n", 0) == 0);
  int lines = 0;
  for (const char ch : csv) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == sp->size() + 1);
}

TEST_CASE("solve mode writes report and profile, exit 0") {
  const fs::path cfg = write_file("bn.json", kBnConfig);
  const fs::path out = temp_dir() / "out_solve";
  fs::remove_all(out);
  const int rc = cli({"solve", "--config", cfg.c_str(), "--out", out.c_str(),
                      "--format", "both"});
  CHECK(rc == 0);
  REQUIRE(fs::exists(out / "report.json"));
  REQUIRE(fs::exists(out / "profile_0.csv"));
  const auto rep = nlohmann::json::parse(read_file(out / "report.json"));
  for (const char* key :
       {"status", "energy", "psi", "s", "grad_norm", "component_norms",
        "iterations", "preset", "grid_n"}) {
    CHECK(rep.contains(key));
  }
  CHECK(rep["status"] == "converged");
  CHECK(read_file(out / "profile_0.csv").rfind("r,u1,u2\n", 0) == 0);
}

TEST_CASE("fixed config and seed give byte-identical reports") {
  const fs::path cfg = write_file("bn.json", kBnConfig);
  const fs::path o1 = temp_dir() / "rep1";
  const fs::path o2 = temp_dir() / "rep2";
  fs::remove_all(o1);
  fs::remove_all(o2);
  REQUIRE(cli({"solve", "--config", cfg.c_str(), "--out", o1.c_str()}) == 0);
  REQUIRE(cli({"solve", "--config", cfg.c_str(), "--out", o2.c_str()}) == 0);
  CHECK(read_file(o1 / "report.json") == read_file(o2 / "report.json"));
}

TEST_CASE("exit codes for invalid inputs") {
  // malformed config: non-symmetric lambda
  std::string bad = kBnConfig;
  const auto pos = bad.find("[[0, -0.5], [-0.5, 0]]");
  bad.replace(pos, 22, "[[0, -0.5], [-0.7, 0]]");
  const fs::path cfg_bad = write_file("bad.json", bad);
  const fs::path out = temp_dir() / "out_bad";
  CHECK(cli({"solve", "--config", cfg_bad.c_str(), "--out", out.c_str()}) == 2);

  // missing config file
  CHECK(cli({"solve", "--config", (temp_dir() / "nope.json").c_str(),
             "--out", out.c_str()}) == 2);

  // unknown subcommand
  CHECK(cli({"frobnicate"}) != 0);
}

TEST_CASE("verify mode passes on the reference config, exit 0") {
  const fs::path cfg = write_file("bn.json", kBnConfig);
  const fs::path out = temp_dir() / "out_verify";
  fs::remove_all(out);
  const int rc = cli({"verify", "--config", cfg.c_str(), "--out", out.c_str()});
  CHECK(rc == 0);
  const auto rep = nlohmann::json::parse(read_file(out / "report.json"));
  REQUIRE(rep.contains("checks"));
  for (const auto& c : rep["checks"]) {
    CHECK(c["passed"].get<bool>());
  }
}
