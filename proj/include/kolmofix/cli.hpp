#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "kolmofix/fixedpoint.hpp"
#include "kolmofix/problem.hpp"
#include "kolmofix/report.hpp"

namespace kolmofix {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

struct RunConfig {
  std::string command;  // solve | verify | residual | diagnose | examples
  std::string problem_path;
  std::string example;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out = "kolmofix-out";
  std::optional<Backend> backend;
  std::optional<bool> compensate;
  std::optional<double> tol;
  std::string lemma;
  std::string measure_path;
  bool list = false;
  bool solve = false;
  bool verify = false;
  bool localized = false;
};

/// Seed, threads, backend, tolerance and truncation overrides. The seed
/// comes from the flag, else KOLMOFIX_SEED, else the problem file.
void apply_overrides(Problem& p, const RunConfig& cfg);

/// Each returns a report body and sets `violation` when a checked
/// condition fails. Artifacts go to `outdir` when it is non-empty.
Json solve_problem(const Problem& p, bool localized, const std::string& outdir, bool& violation);
Json verify_problem(const Problem& p, bool& violation);
Json residual_problem(const Problem& p, const std::string& measure_path, std::optional<double> threshold,
                      const std::string& outdir, bool& violation);
Json diagnose_problem(const Problem& p, const std::string& lemma, const std::string& outdir, bool& violation);

/// Executes a parsed command; returns the exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// argv entry point for the kolmofix binary.
int cli_main(int argc, char** argv);

}  // namespace kolmofix
