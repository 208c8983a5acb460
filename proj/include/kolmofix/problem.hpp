#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kolmofix/coeff.hpp"
#include "kolmofix/diagnostics.hpp"
#include "kolmofix/fixedpoint.hpp"
#include "kolmofix/lyapunov.hpp"

namespace kolmofix {

// Problem files are `key = value` lines; `#` starts a comment and values may
// be double-quoted. Recognised keys:
//
//   name, dim, m
//   a[i][j], b[i]                      coefficient expressions, 1-based
//   V, W, H                            Lyapunov functions (W may use INT)
//   lyapunov.C, .Lambda, .C1, .C2, .eps
//   domain.lower, domain.upper         working cube, same on every axis
//   solver.backend                     closed | grid | particle
//   solver.cells                       grid cells per axis
//   solver.dt, .T, .burn_in, .particles, .snapshots, .seed, .guard, .threads
//   picard.theta, .max_iter, .tol, .R, .max_atoms
//   init.kind                          gaussian | sample | dirac
//   init.mean, init.sd, init.n         init.n: atoms for `sample`, cells for `gaussian`
//   truncation.levels                  comma-separated, e.g. 4,6,8
//   truncation.compensate              origin-atom | none
//   truncation.M
//   checks.lower, checks.upper         cube for the coefficient checks
//   checks.resolution, .pairs, .clouds, .cloud_atoms, .cloud_width, .seed
//   checks.grid                        points per axis of the pointwise grid
//   projection.ky_lower, .ky_upper, .eta_lower, .eta_upper, .ramp, .r, .S, .gamma

struct InitSpec {
  std::string kind = "gaussian";
  double mean = 0.0;
  double sd = 1.0;
  std::size_t n = 0;
};

struct CheckSpec {
  double lower = -2.0;
  double upper = 2.0;
  int resolution = 41;
  std::size_t pairs = 20000;
  std::size_t clouds = 100;
  std::size_t cloud_atoms = 16;
  double cloud_width = 3.0;
  std::uint64_t seed = 7;
  int grid = 161;
};

struct Problem {
  std::string name;
  int dim = 1;
  int m = 1;
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::shared_ptr<const ExprField> field;
  LyapunovSpec lyap;
  double eps = 0.1;
  Cube domain;
  PicardConfig picard;
  InitSpec init;
  LocalizedConfig truncation;
  bool has_truncation = false;
  CheckSpec checks;
  RegularityConfig projection;

  bool has_lyapunov() const { return lyap.V.valid(); }
  DiscreteMeasure initial_measure() const;
  Cube check_cube() const;
};

/// Throws ParseError (with line) or ConfigError.
Problem parse_problem(const std::string& text);
/// Throws ConfigError when the file cannot be read.
Problem load_problem(const std::string& path);

struct PresetInfo {
  std::string name;
  std::string summary;
  std::string text;
};

const std::vector<PresetInfo>& presets();
/// Throws ConfigError for an unknown name.
const PresetInfo& preset(const std::string& name);

}  // namespace kolmofix
