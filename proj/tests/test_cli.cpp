#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kolmofix/cli.hpp"
#include "kolmofix/error.hpp"
#include "kolmofix/io.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kolmofix-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(std::string s) {
  const auto at = s.find("\"timestamp\"");
  if (at == std::string::npos) return s;
  return s.erase(at, s.find('\n', at) - at);
}

const char* kSmallParticle = R"(name = small
dim = 1
m = 1
a[1][1] = 1
b[1] = "INT(y1) / 2 - x1"
V = x1^2/2
lyapunov.C = 1
lyapunov.Lambda = 1
solver.backend = particle
solver.particles = 200
solver.T = 4
solver.burn_in = 1
solver.dt = 1e-2
solver.snapshots = 5
solver.seed = 1
picard.max_iter = 3
)";

int run_cmd(RunConfig cfg, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(cfg, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("missing problem file is an error") {
  RunConfig cfg;
  cfg.command = "solve";
  cfg.problem_path = "/nonexistent/problem.cfg";
  cfg.out = scratch("missing").string();
  std::string err;
  CHECK(run_cmd(cfg, nullptr, &err) == kExitError);
  CHECK(err.find("kolmofix: error:") == 0);
}

TEST_CASE("argv parsing") {
  const char* help[] = {"kolmofix", "--help"};
  CHECK(cli_main(2, const_cast<char**>(help)) == kExitPass);
  const char* bad[] = {"kolmofix", "--backend", "magic", "solve", "x.cfg"};
  CHECK(cli_main(5, const_cast<char**>(bad)) == kExitError);
  const char* none[] = {"kolmofix"};
  CHECK(cli_main(1, const_cast<char**>(none)) == kExitError);
}

TEST_CASE("presets parse and list") {
  CHECK(presets().size() == 6);
  for (const char* name : {"ou", "cubic-interaction", "compact-support-diffusion", "half-line-diffusion",
                           "langevin-kinetic", "langevin-meanfield"}) {
    CAPTURE(name);
    const Problem p = parse_problem(preset(name).text);
    CHECK(p.name == name);
    CHECK(p.has_lyapunov());
  }
  CHECK_THROWS_AS(preset("nope"), ConfigError);
  CHECK(parse_problem(preset("half-line-diffusion").text).m == 0);
  CHECK(parse_problem(preset("cubic-interaction").text).m == 0);

  RunConfig cfg;
  cfg.command = "examples";
  cfg.list = true;
  std::string out;
  CHECK(run_cmd(cfg, &out) == kExitPass);
  CHECK(out.find("langevin-kinetic") != std::string::npos);
}

TEST_CASE("each preset satisfies the coefficient hypotheses on its cube") {
  for (const PresetInfo& info : presets()) {
    CAPTURE(info.name);
    const Problem p = parse_problem(info.text);
    const auto mus = random_clouds(p.dim, 5, 8, 2.0, 3);
    const int res = p.dim == 1 ? 41 : 11;
    CHECK(check_H11(*p.field, p.check_cube(), mus, res).passed);
    CHECK(check_H12(*p.field, p.check_cube(), mus, res).passed);
    CHECK(check_H13(*p.field, p.check_cube(), mus, 500).passed);
  }
}

TEST_CASE("parse errors carry the line") {
  const std::string text = "name = broken\ndim = 1\nm = 1\na[1][1] = 1 +\nb[1] = -x1\n";
  try {
    parse_problem(text);
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
  }
  CHECK_THROWS_AS(parse_problem("name = x\ndim = 7\n"), ConfigError);
  CHECK_THROWS(parse_problem("name = x\ndim = 1\nm = 1\na[1][1] = 1\nb[1] = -x1\nsolver.backend = warp\n"));

  const fs::path dir = scratch("parse");
  std::ofstream(dir / "bad.cfg") << text;
  RunConfig cfg;
  cfg.command = "solve";
  cfg.problem_path = (dir / "bad.cfg").string();
  cfg.out = (dir / "out").string();
  std::string err;
  CHECK(run_cmd(cfg, nullptr, &err) == kExitError);
  CHECK(err.find("line 4") != std::string::npos);
}

TEST_CASE("seeded runs are byte-identical") {
  const fs::path dir = scratch("seed");
  std::ofstream(dir / "small.cfg") << kSmallParticle;
  RunConfig cfg;
  cfg.command = "solve";
  cfg.problem_path = (dir / "small.cfg").string();
  cfg.seed = 42;
  cfg.out = (dir / "a").string();
  REQUIRE(run_cmd(cfg) != kExitError);
  cfg.out = (dir / "b").string();
  REQUIRE(run_cmd(cfg) != kExitError);
  CHECK(slurp(dir / "a" / "measure.csv") == slurp(dir / "b" / "measure.csv"));
  CHECK(without_timestamp(slurp(dir / "a" / "report.json")) == without_timestamp(slurp(dir / "b" / "report.json")));

  cfg.seed = 43;
  cfg.out = (dir / "c").string();
  REQUIRE(run_cmd(cfg) != kExitError);
  CHECK(slurp(dir / "a" / "measure.csv") != slurp(dir / "c" / "measure.csv"));

  cfg.seed.reset();
  ::setenv("KOLMOFIX_SEED", "42", 1);
  cfg.out = (dir / "env").string();
  REQUIRE(run_cmd(cfg) != kExitError);
  ::unsetenv("KOLMOFIX_SEED");
  CHECK(slurp(dir / "a" / "measure.csv") == slurp(dir / "env" / "measure.csv"));
}

TEST_CASE("OU example solves to the standard normal") {
  RunConfig cfg;
  cfg.command = "examples";
  cfg.example = "ou";
  cfg.solve = true;
  cfg.out = scratch("ou").string();
  std::string out;
  CHECK(run_cmd(cfg, &out) == kExitPass);
  CHECK(out.find("all checks passed") != std::string::npos);
  const fs::path base = fs::path(cfg.out) / "ou";
  const DiscreteMeasure mu = read_measure_csv((base / "measure.csv").string());
  CHECK(std::abs(moment(mu, 2.0) - 1.0) <= 1e-3);
  CHECK(fs::exists(base / "iterates.csv"));
  CHECK(fs::exists(base / "grid.json"));
  CHECK(slurp(base / "report.json").find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("cubic example") {
  RunConfig cfg;
  cfg.command = "examples";
  cfg.example = "cubic-interaction";
  cfg.out = scratch("cubic").string();
  CHECK(run_cmd(cfg) == kExitPass);
  const fs::path base = fs::path(cfg.out) / "cubic-interaction";
  const std::string report = slurp(base / "report.json");
  CHECK(report.find("\"integral\"") != std::string::npos);
  const DiscreteMeasure mu = read_measure_csv((base / "measure.csv").string());
  CHECK(moment(mu, 1.0) <= 0.05);
}

TEST_CASE("residual threshold sets the exit code") {
  const fs::path dir = scratch("residual");
  const Problem ou = parse_problem(preset("ou").text);
  std::ofstream(dir / "ou.cfg") << preset("ou").text;
  write_measure_csv((dir / "shifted.csv").string(), atoms1({2.0, 3.0}, {0.5, 0.5}));
  RunConfig cfg;
  cfg.command = "residual";
  cfg.problem_path = (dir / "ou.cfg").string();
  cfg.measure_path = (dir / "shifted.csv").string();
  cfg.tol = 1e-3;
  cfg.out = (dir / "out").string();
  CHECK(run_cmd(cfg) == kExitViolation);
  cfg.tol = 1e9;
  CHECK(run_cmd(cfg) == kExitPass);
  CHECK(ou.dim == 1);
}

}  // TEST_SUITE
