#include <doctest.h>

#include <cmath>

#include "kolmofix/error.hpp"
#include "kolmofix/frozen.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;

namespace {

double l1_distance(const GridDensity& p, const GridDensity& q) {
  double s = 0.0;
  for (std::size_t c = 0; c < p.cells(); ++c) s += std::abs(p.values()[c] - q.values()[c]);
  return s * p.cell_volume();
}

const TestFunction& find_test(const std::vector<TestFunction>& battery, const std::string& name) {
  for (const auto& t : battery) {
    if (t.name == name) return t;
  }
  FAIL("no test function " << name);
  return battery.front();
}

}  // namespace

TEST_SUITE("frozen") {

TEST_CASE("closed form") {
  const auto ou = field1("1", "-x1");
  const auto frozen = ou->freeze(delta(0.0));
  const GridDensity g = solve_1d_closed(*frozen, Axis{-8.0, 8.0, 400});
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(moment(g, 2.0) - 1.0) <= 1e-3);

  const auto flat = field1("1", "0");
  const GridDensity u = solve_1d_closed(*flat->freeze(delta(0.0)), Axis{0.0, 1.0, 50});
  for (double v : u.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const auto half = field1("x1 * IND(x1 >= 0)", "INT(2*y1) - x1", 0);
  CHECK_THROWS_AS(solve_1d_closed(*half->freeze(delta(1.0)), Axis{-1.0, 1.0, 40}), DegenerateCoefficientError);
}

TEST_CASE("finite volumes") {
  const auto ou = field1("1", "-x1");
  const auto frozen = ou->freeze(delta(0.0));
  const Axis ax{-8.0, 8.0, 400};
  const GridDensity fv = solve_grid_fv(*frozen, {ax});
  CHECK(fv.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l1_distance(fv, solve_1d_closed(*frozen, ax)) <= 1e-3);

  const auto ou2 = field2({"1", "", "", "1"}, {"-x1", "-x2"}, 2);
  const Axis a2{-6.0, 6.0, 60};
  const GridDensity g2 = solve_grid_fv(*ou2->freeze(DiscreteMeasure::dirac({0.0, 0.0})), {a2, a2});
  const DiscreteMeasure m2 = g2.to_measure();
  CHECK(g2.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment(m2, 2.0, {MomentKind::component, 0}) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(moment(m2, 2.0, {MomentKind::component, 1}) == doctest::Approx(1.0).epsilon(0.01));
  double cross = 0.0;
  for (std::size_t k = 0; k < m2.size(); ++k) cross += m2.weight(k) * m2.coord(k, 0) * m2.coord(k, 1);
  CHECK(std::abs(cross) < 0.01);

  const auto flat = field2({"1", "", "", "1"}, {"0", "0"}, 2);
  const Axis box{0.0, 1.0, 10};
  const GridDensity u = solve_grid_fv(*flat->freeze(DiscreteMeasure::dirac({0.0, 0.0})), {box, box});
  for (double v : u.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

  const auto skew = field2({"1", "0.5", "", "1"}, {"-x1", "-x2"}, 2);
  CHECK_THROWS_AS(solve_grid_fv(*skew->freeze(DiscreteMeasure::dirac({0.0, 0.0})), {box, box}), SolverError);
}

TEST_CASE("finite volumes with degenerate diffusion stay positive") {
  const auto f = field1("x1^2 * 0.001", "-2 * x1^3");
  const GridDensity g = solve_grid_fv(*f->freeze(delta(0.0)), {Axis{-8.0, 8.0, 2000}});
  CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : g.values()) CHECK(v >= 0.0);
}

TEST_CASE("ergodic OU") {
  const auto ou = field1("1", "-x1");
  SdeConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 60.0;
  cfg.burn_in = 5.0;
  cfg.particles = 2000;
  cfg.snapshots = 100;
  cfg.seed = 3;
  const ErgodicResult r = solve_ergodic(*ou->freeze(delta(0.0)), delta(0.0), cfg);
  CHECK(r.measure.size() == cfg.particles * cfg.snapshots);
  auto sq = [](const double* x) { return x[0] * x[0]; };
  const double m2 = moment(r.measure, 2.0);
  const double se = ergodic_std_error(r, sq);
  // Euler-Maruyama variance is 1 / (1 - dt / 2).
  CHECK(std::abs(m2 - 1.0 / (1.0 - cfg.dt / 2.0)) <= 3.0 * se);

  const ErgodicResult again = solve_ergodic(*ou->freeze(delta(0.0)), delta(0.0), cfg);
  CHECK(again.measure.coords() == r.measure.coords());
}

TEST_CASE("ergodic run is reproducible across thread counts") {
  const auto ou = field1("1", "-x1");
  SdeConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 5.0;
  cfg.burn_in = 1.0;
  cfg.particles = 700;
  cfg.snapshots = 10;
  const ErgodicResult one = solve_ergodic(*ou->freeze(delta(0.0)), gaussian_sample(1, 50, 0.0, 1.0, 2), cfg);
  cfg.threads = 3;
  const ErgodicResult three = solve_ergodic(*ou->freeze(delta(0.0)), gaussian_sample(1, 50, 0.0, 1.0, 2), cfg);
  CHECK(one.measure.coords() == three.measure.coords());
}

TEST_CASE("ergodic seeds scatter within four standard errors") {
  const auto ou = field1("1", "-x1");
  SdeConfig cfg;
  cfg.dt = 2e-2;
  cfg.T = 30.0;
  cfg.burn_in = 3.0;
  cfg.particles = 500;
  cfg.snapshots = 50;
  auto sq = [](const double* x) { return x[0] * x[0]; };
  int inside = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    cfg.seed = s;
    const ErgodicResult r = solve_ergodic(*ou->freeze(delta(0.0)), delta(0.0), cfg);
    if (std::abs(moment(r.measure, 2.0) - 1.0 / (1.0 - cfg.dt / 2.0)) <= 4.0 * ergodic_std_error(r, sq)) ++inside;
  }
  CHECK(inside >= 19);
}

TEST_CASE("pure transport collapses to the origin") {
  const auto f = field1("0", "-x1", 0);
  SdeConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 12.0;
  cfg.burn_in = 6.0;
  cfg.particles = 256;
  cfg.snapshots = 20;
  const DiscreteMeasure init = atoms1({-2.0, 1.0, 3.0}, {0.2, 0.5, 0.3});
  const ErgodicResult r = solve_ergodic(*f->freeze(init), init, cfg);
  CHECK(moment(r.measure, 1.0) <= std::exp(-(cfg.T - cfg.burn_in)) * moment(init, 1.0));
  CHECK(moment(r.measure, 1.0) >= 0.0);
}

TEST_CASE("ergodic Langevin") {
  const auto lv = field2({"1", "", "", "0"}, {"-x1 - x2", "x1"}, 1);
  SdeConfig cfg;
  cfg.dt = 5e-3;
  cfg.T = 40.0;
  cfg.burn_in = 8.0;
  cfg.particles = 2000;
  cfg.snapshots = 100;
  const ErgodicResult r = solve_ergodic(*lv->freeze(DiscreteMeasure::dirac({0.0, 0.0})), DiscreteMeasure::dirac({0.0, 0.0}), cfg);
  auto yy = [](const double* x) { return x[0] * x[0]; };
  auto zz = [](const double* x) { return x[1] * x[1]; };
  auto yz = [](const double* x) { return x[0] * x[1]; };
  double e_yz = 0.0;
  for (std::size_t k = 0; k < r.measure.size(); ++k) e_yz += r.measure.weight(k) * r.measure.coord(k, 0) * r.measure.coord(k, 1);
  // Discretization bias at this dt is O(dt); allow it on top of the sampling error.
  CHECK(std::abs(moment(r.measure, 2.0, {MomentKind::component, 0}) - 1.0) <= 3.0 * ergodic_std_error(r, yy) + 0.01);
  CHECK(std::abs(moment(r.measure, 2.0, {MomentKind::component, 1}) - 1.0) <= 3.0 * ergodic_std_error(r, zz) + 0.01);
  CHECK(std::abs(e_yz) <= 3.0 * ergodic_std_error(r, yz) + 0.01);
}

TEST_CASE("ergodic guard names the time") {
  const auto f = field1("1", "x1");
  SdeConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 100.0;
  cfg.burn_in = 1.0;
  cfg.particles = 16;
  cfg.guard = 100.0;
  cfg.snapshots = 10;
  CHECK_THROWS_WITH_AS(solve_ergodic(*f->freeze(delta(0.0)), delta(1.0), cfg), doctest::Contains("t ="), SolverError);
  SdeConfig bad = cfg;
  bad.burn_in = 200.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("weak residual") {
  const auto battery = default_battery(1);
  CHECK(battery.size() == 5);
  const auto cubic = field1("x1^2 * MOM(1,abs)^3", "-2 * x1^3 * MOM(1,abs)", 0);
  const ResidualReport zero = weak_residual(delta(0.0), *cubic->freeze(delta(0.0)), battery);
  CHECK(zero.max_abs == 0.0);

  const auto ou = field1("1", "-x1");
  const auto frozen = ou->freeze(delta(0.0));
  const DiscreteMeasure g = solve_grid_fv(*frozen, {Axis{-8.0, 8.0, 400}}).to_measure();
  CHECK(weak_residual(g, *frozen, battery).max_abs <= 1e-3);

  const DiscreteMeasure shifted = gaussian_grid({Axis{-8.0, 10.0, 900}}, 1.0, 1.0).to_measure();
  const ResidualReport rs = weak_residual(shifted, *frozen, battery);
  const TestFunction& he1 = find_test(battery, "He1(x1)*bump");
  std::size_t idx = 0;
  while (battery[idx].name != he1.name) ++idx;
  CHECK(std::abs(rs.values[idx]) > 0.1);
  CHECK(rs.max_abs > 0.1);

  CHECK(default_battery(2).size() == 15);
  CHECK_THROWS(weak_residual(g, *frozen, {}));
}

}  // TEST_SUITE
