#include "kolmofix/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "kolmofix/error.hpp"
#include "kolmofix/io.hpp"

namespace kolmofix {
namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::vector<std::vector<double>> grid_points(const Cube& c, int per_axis) { return cube_nodes(c, per_axis); }

std::vector<DiscreteMeasure> check_family(const Problem& p) {
  return random_clouds(p.dim, p.checks.clouds, p.checks.cloud_atoms, p.checks.cloud_width, p.checks.seed);
}

Json moment_summary(const Problem& p, const DiscreteMeasure& mu, bool& violation) {
  Json j;
  if (!p.has_lyapunov()) return j;
  const CheckReport b = verify_moment_bound(mu, p.lyap.V, p.lyap.C, p.lyap.Lambda);
  violation = violation || !b.passed;
  return to_json(b);
}

std::string lemma_name(const std::string& s) {
  if (s == "4.1" || s == "projection") return "projection";
  if (s == "4.2" || s == "coefficients") return "coefficients";
  if (s == "4.3" || s == "mollification") return "mollification";
  throw ConfigError("unknown diagnostic '" + s + "' (projection, coefficients or mollification; 4.1, 4.2, 4.3)");
}

}  // namespace

void apply_overrides(Problem& p, const RunConfig& cfg) {
  if (cfg.seed) {
    p.picard.sde.seed = *cfg.seed;
  } else if (const char* env = std::getenv("KOLMOFIX_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError("KOLMOFIX_SEED must be a nonnegative integer");
    p.picard.sde.seed = v;
  }
  if (cfg.threads) p.picard.sde.threads = std::max(1u, *cfg.threads);
  if (cfg.backend) p.picard.backend = *cfg.backend;
  if (cfg.tol) p.picard.tol = *cfg.tol;
  if (cfg.compensate) p.truncation.compensate = *cfg.compensate;
  p.picard.validate();
}

Json solve_problem(const Problem& p, bool localized, const std::string& outdir, bool& violation) {
  const DiscreteMeasure mu0 = p.initial_measure();
  SolveReport rep;
  if (localized) {
    if (!p.has_lyapunov()) throw ConfigError("localized solve needs V and lyapunov constants");
    rep = localized_solve(p.field, p.lyap, mu0, p.truncation, p.picard);
    violation = violation || !rep.bound_ok;
  } else {
    rep = picard_solve(*p.field, mu0, p.picard);
  }
  violation = violation || rep.status != SolveStatus::converged;
  Json j;
  j["problem"] = p.name;
  j["command"] = localized ? "solve --localized" : "solve";
  j["backend"] = backend_name(p.picard.backend);
  j["seed"] = p.picard.sde.seed;
  j["field"] = p.field->describe();
  j["solve"] = to_json(rep);
  const Json bound = moment_summary(p, rep.final_measure, violation);
  if (!bound.is_null()) j["moment_bound"] = bound;
  if (!outdir.empty()) {
    write_measure_csv(join(outdir, "measure.csv"), rep.final_measure);
    write_iterates_csv(join(outdir, "iterates.csv"), rep);
    if (rep.final_grid) write_grid_json(join(outdir, "grid.json"), *rep.final_grid);
  }
  return j;
}

Json verify_problem(const Problem& p, bool& violation) {
  const CoefficientField& field = *p.field;
  const Cube K = p.check_cube();
  std::vector<DiscreteMeasure> family = check_family(p);
  family.push_back(DiscreteMeasure::dirac(std::vector<double>(static_cast<std::size_t>(p.dim), 0.0)));

  Json j;
  j["problem"] = p.name;
  j["command"] = "verify";
  j["field"] = field.describe();
  Json h1 = Json::array();
  for (const AssumptionReport& r : {check_H11(field, K, family, p.checks.resolution),
                                    check_H12(field, K, family, p.checks.resolution),
                                    check_H13(field, K, family, p.checks.pairs, p.checks.seed)}) {
    violation = violation || !r.passed;
    h1.push_back(to_json(r));
  }
  j["coefficients"] = h1;
  if (!p.has_lyapunov()) {
    j["notes"] = {"no V given; drift conditions not checked"};
    return j;
  }

  const int per_axis = p.dim == 1 ? p.checks.grid : std::min(p.checks.grid, 41);
  const auto points = grid_points(p.domain, per_axis);
  const auto dirac_points = grid_points(p.domain, p.dim == 1 ? per_axis : 11);
  std::vector<DiscreteMeasure> pointwise_family = dirac_family(dirac_points);
  pointwise_family.push_back(DiscreteMeasure::dirac(std::vector<double>(static_cast<std::size_t>(p.dim), 0.0)));
  const auto clouds = check_family(p);
  pointwise_family.insert(pointwise_family.end(), clouds.begin(), clouds.end());

  // The pointwise condition is stronger than what the theory needs; its
  // outcome is reported, not counted as a violation.
  Json pw;
  pw["configured"] = to_json(check_pointwise(field, p.lyap.V, p.lyap.C, p.lyap.Lambda, points, pointwise_family));
  pw["sweep"] = to_json(sweep_pointwise(field, p.lyap.V, default_C_sweep(), default_Lambda_sweep(), points, pointwise_family));
  j["pointwise"] = pw;

  std::vector<DiscreteMeasure> integral_family = clouds;
  const auto diracs = dirac_family(dirac_points);
  integral_family.insert(integral_family.end(), diracs.begin(), diracs.end());
  const CheckReport integral = check_integral(field, p.lyap, integral_family);
  violation = violation || !integral.passed;
  j["integral"] = to_json(integral);

  const CheckReport h32 = check_H32(field, p.lyap, family, &p.domain, p.eps);
  violation = violation || !h32.passed;
  j["H3.2"] = to_json(h32);

  if (p.lyap.W.valid() && p.lyap.W.measure_dependent()) {
    Json cands = Json::array();
    for (const Function& f : independent_candidates(p.dim)) {
      LyapunovSpec s = p.lyap;
      s.V = f;
      s.W = f;
      bool any = false;
      for (double C : default_C_sweep()) {
        for (double L : default_Lambda_sweep()) {
          s.C = C;
          s.Lambda = L;
          any = any || check_integral(field, s, integral_family).passed;
        }
      }
      cands.push_back({{"W", f.text()}, {"passes_for_some_constants", any}});
    }
    j["independent_candidates"] = cands;
  }
  return j;
}

Json residual_problem(const Problem& p, const std::string& measure_path, std::optional<double> threshold,
                      const std::string& outdir, bool& violation) {
  Json j;
  j["problem"] = p.name;
  j["command"] = "residual";
  DiscreteMeasure mu;
  if (measure_path.empty()) {
    bool ignored = false;
    j["solve"] = solve_problem(p, false, outdir, ignored)["solve"];
    mu = read_measure_csv(join(outdir, "measure.csv"));
  } else {
    mu = read_measure_csv(measure_path);
    j["measure"] = measure_path;
  }
  if (mu.dim() != p.dim) throw MeasureError("measure dimension does not match the problem");
  const auto battery = default_battery(p.dim);
  const ResidualReport r = weak_residual(mu, *p.field->freeze(mu), battery);
  j["residual"] = to_json(r, battery);
  if (threshold) {
    j["threshold"] = *threshold;
    violation = violation || r.max_abs > *threshold;
  }
  return j;
}

Json diagnose_problem(const Problem& p, const std::string& lemma, const std::string& outdir, bool& violation) {
  const std::string which = lemma_name(lemma);
  Json j;
  j["problem"] = p.name;
  j["command"] = "diagnose";
  j["diagnostic"] = which;
  const Cube K = p.check_cube();
  if (which == "projection") {
    if (p.m < 1 || p.m >= p.dim) throw ConfigError("projection diagnostic needs 1 <= m < d");
    const SolveReport rep = picard_solve(*p.field, p.initial_measure(), p.picard);
    const RegularityReport r = projection_regularity(rep.final_measure, p.projection);
    violation = violation || !r.in_class;
    j["solve_status"] = status_name(rep.status);
    j["regularity"] = to_json(r);
    if (!outdir.empty()) {
      TrendReport t;
      for (const auto& [h, n] : r.schedule) {
        t.params.push_back(h);
        t.gaps.push_back(n);
      }
      write_trend_csv(join(outdir, "projection_trend.csv"), t);
    }
    return j;
  }
  const DiscreteMeasure sigma = p.initial_measure();
  TrendReport t;
  if (which == "coefficients") {
    const std::vector<DiscreteMeasure> tests{uniform_cloud(K, p.dim == 1 ? 400 : 40), sigma};
    t = coefficient_convergence_study(*p.field, sigma, {100, 1000, 10000}, 20, tests, K, 3.0, p.picard.sde.seed);
  } else {
    if (p.m < 1) throw ConfigError("mollification acts on y; the problem has m = 0");
    Cube Q = K;
    for (double& v : Q.lower) v -= 1.5;
    for (double& v : Q.upper) v += 1.5;
    const std::vector<DiscreteMeasure> tests{uniform_cloud(K, p.dim == 1 ? 2000 : 64)};
    t = mollification_convergence(p.field, MollifierKernel::Kind::box, {0.5, 0.25, 0.125}, tests, {sigma}, K, Q);
  }
  violation = violation || !t.passed;
  j["trend"] = to_json(t);
  if (!outdir.empty()) write_trend_csv(join(outdir, which + "_trend.csv"), t);
  return j;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "examples" && (cfg.list || cfg.example.empty())) {
      for (const PresetInfo& p : presets()) out << p.name << "  " << p.summary << '\n';
      return kExitPass;
    }
    Problem problem = cfg.command == "examples" ? parse_problem(preset(cfg.example).text) : load_problem(cfg.problem_path);
    apply_overrides(problem, cfg);
    std::string outdir = cfg.out;
    if (cfg.command == "examples") outdir = join(cfg.out, problem.name);
    std::filesystem::create_directories(outdir);

    bool violation = false;
    Json body;
    if (cfg.command == "solve") {
      body = solve_problem(problem, cfg.localized, outdir, violation);
    } else if (cfg.command == "verify") {
      body = verify_problem(problem, violation);
    } else if (cfg.command == "residual") {
      body = residual_problem(problem, cfg.measure_path, cfg.tol, outdir, violation);
    } else if (cfg.command == "diagnose") {
      body = diagnose_problem(problem, cfg.lemma, outdir, violation);
    } else if (cfg.command == "examples") {
      const bool solve = cfg.solve || !cfg.verify;
      const bool verify = cfg.verify || !cfg.solve;
      body["problem"] = problem.name;
      body["command"] = "examples";
      if (solve) body["solve"] = solve_problem(problem, cfg.localized, outdir, violation);
      if (verify) body["verify"] = verify_problem(problem, violation);
    } else {
      throw ConfigError("unknown command '" + cfg.command + "'");
    }
    body["violation"] = violation;
    const std::string path = join(outdir, "report.json");
    write_report(path, body);
    out << (violation ? "violations found" : "all checks passed") << "; report written to " << path << '\n';
    return violation ? kExitViolation : kExitPass;
  } catch (const std::exception& e) {
    err << "kolmofix: error: " << e.what() << '\n';
    return kExitError;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Solver and verifier for stationary nonlinear Kolmogorov equations"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string backend;
  std::string compensate;
  double tol = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides KOLMOFIX_SEED and the problem file)");
  auto* threads_opt = app.add_option("--threads", threads, "worker cap for particle runs");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  auto* backend_opt = app.add_option("--backend", backend, "frozen solver")->check(CLI::IsMember({"closed", "grid", "particle"}));
  auto* comp_opt =
      app.add_option("--compensate", compensate, "truncation variant")->check(CLI::IsMember({"origin-atom", "none"}));
  auto* tol_opt = app.add_option("--tol", tol, "Picard tolerance; residual threshold for `residual`");

  auto* solve = app.add_subcommand("solve", "fixed-point solve of a problem file");
  solve->add_option("problem", cfg.problem_path, "problem file")->required();
  solve->add_flag("--localized", cfg.localized, "run the truncation sequence from truncation.levels");
  auto* verify = app.add_subcommand("verify", "check coefficient and drift conditions");
  verify->add_option("problem", cfg.problem_path, "problem file")->required();
  auto* residual = app.add_subcommand("residual", "weak residual of a measure");
  residual->add_option("problem", cfg.problem_path, "problem file")->required();
  residual->add_option("--measure", cfg.measure_path, "measure CSV (solves the problem when absent)");
  auto* diagnose = app.add_subcommand("diagnose", "projection, coefficient and mollification diagnostics");
  diagnose->add_option("problem", cfg.problem_path, "problem file")->required();
  diagnose->add_option("--lemma", cfg.lemma, "projection | coefficients | mollification (or 4.1, 4.2, 4.3)")->required();
  auto* examples = app.add_subcommand("examples", "built-in problems");
  examples->add_option("name", cfg.example, "preset name");
  examples->add_flag("--list", cfg.list, "list presets");
  examples->add_flag("--solve", cfg.solve, "solve the preset");
  examples->add_flag("--verify", cfg.verify, "verify the preset");
  examples->add_flag("--localized", cfg.localized, "use the truncation sequence when solving");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }
  for (auto* sub : {solve, verify, residual, diagnose, examples}) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }
  if (*seed_opt) cfg.seed = seed;
  if (*threads_opt) cfg.threads = threads;
  if (*backend_opt) cfg.backend = parse_backend(backend);
  if (*comp_opt) cfg.compensate = compensate == "origin-atom";
  if (*tol_opt) cfg.tol = tol;
  return run(cfg, std::cout, std::cerr);
}

}  // namespace kolmofix
