#include <doctest.h>

#include <cmath>

#include "kolmofix/diagnostics.hpp"
#include "kolmofix/error.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;

namespace {

ProjectionWindow window2() {
  ProjectionWindow w;
  w.m = 1;
  w.eta = SmoothWindow{{-2.0}, {2.0}, 1.0};
  w.ky_lower = {-1.0};
  w.ky_upper = {1.0};
  w.qy_lower = {-3.0};
  w.qy_upper = {3.0};
  w.r = 2.0;
  w.S = 10.0;
  return w;
}

Cube cube1(double lo, double hi) { return Cube{{lo}, {hi}}; }

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("projection of a product density is regular") {
  RegularityConfig cfg;
  cfg.window = window2();
  cfg.bandwidth = 0.2;
  const DiscreteMeasure mu = gaussian_sample(2, 40000, 0.0, 1.0, 11);
  const RegularityReport r = projection_regularity(mu, cfg);
  CHECK(r.in_class);
  CHECK(std::abs(r.growth_exponent) < 0.1);
  CHECK(r.projected_mass > 0.5);
  CHECK(r.schedule.size() == 3);
}

TEST_CASE("projection of a y-singular measure is flagged") {
  RegularityConfig cfg;
  cfg.window = window2();
  cfg.bandwidth = 0.2;
  std::vector<double> pts;
  for (int i = 0; i < 200; ++i) {
    pts.push_back(0.0);
    pts.push_back(-1.0 + 2.0 * (i + 0.5) / 200);
  }
  const RegularityReport r = projection_regularity(DiscreteMeasure::uniform(2, pts), cfg);
  CHECK_FALSE(r.in_class);
  CHECK(r.growth_exponent >= 0.4);
  CHECK_FALSE(r.notes.empty());

  const DiscreteMeasure far(2, {0.0, 9.0}, {1.0});
  CHECK_THROWS_AS(projection_regularity(far, cfg), MeasureError);
}

TEST_CASE("h2 exponent") {
  CHECK(std::isinf(h2_exponent(0)));
  CHECK(h2_exponent(1, 1.0) == 2.0);
  CHECK(h2_exponent(1, 0.5) == 1.5);
  CHECK(h2_exponent(3) == 3.0);
  RegularityConfig cfg;
  cfg.window.m = 1;
  cfg.gamma = 2.0;
  CHECK(cfg.r_prime() == 3.0);
}

TEST_CASE("coefficient convergence") {
  const Cube K = cube1(-2.0, 2.0);
  const std::vector<DiscreteMeasure> tests{uniform_cloud(K, 400)};

  const auto ou = field1("1", "-x1");
  const TrendReport flat = coefficient_convergence(*ou, delta(0.0), {delta(1.0), delta(0.5)}, {1.0, 2.0}, tests, K);
  for (double g : flat.gaps) CHECK(g == 0.0);
  CHECK(flat.passed);
  CHECK_FALSE(flat.notes.empty());

  const auto mf = field1("1", "INT(2*y1) - x1");
  std::vector<DiscreteMeasure> seq;
  std::vector<double> ns;
  for (int n : {1, 2, 4, 8, 16, 32, 64}) {
    seq.push_back(delta(1.0 / n));
    ns.push_back(n);
  }
  const TrendReport r = coefficient_convergence(*mf, delta(0.0), seq, ns, tests, K);
  for (std::size_t i = 0; i < ns.size(); ++i) CHECK(r.gaps[i] == doctest::Approx(2.0 / ns[i]).epsilon(1e-9));
  CHECK(r.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(r.monotone);
  CHECK(r.passed);

  CHECK_THROWS_AS(coefficient_convergence(*mf, delta(0.0), seq, {1.0}, tests, K), ConfigError);
}

TEST_CASE("empirical coefficient gap decays like n^-1/2") {
  const Cube K = cube1(-2.0, 2.0);
  const auto mf = field1("1", "INT(2*y1) - x1");
  const DiscreteMeasure sigma = gaussian_grid({Axis{-8.0, 8.0, 800}}, 0.0, 1.0).to_measure(true);
  const TrendReport r =
      coefficient_convergence_study(*mf, sigma, {100, 1000, 10000}, 20, {uniform_cloud(K, 400)}, K);
  CHECK(r.passed);
  CHECK(r.slope == doctest::Approx(-0.5).epsilon(0.3));
  const DiscreteMeasure e = empirical_sample(two_point(), 1000, 3);
  CHECK(e.size() == 1000);
  for (double c : e.coords()) CHECK(std::abs(std::abs(c) - 1.0) == 0.0);
}

TEST_CASE("mollification convergence") {
  const Cube K = cube1(-1.0, 1.0);
  const Cube Q = cube1(-2.5, 2.5);
  const std::vector<DiscreteMeasure> tests{uniform_cloud(K, 2000)};
  const std::vector<DiscreteMeasure> sigmas{two_point()};
  const std::vector<double> deltas{0.5, 0.25, 0.125};

  const TrendReport c = mollification_convergence(field1("2", "-1"), MollifierKernel::Kind::box, deltas, tests, sigmas, K, Q);
  for (double g : c.gaps) CHECK(g == doctest::Approx(0.0).epsilon(1e-12));

  // Uniform test density 1/2 on K times the L1 gap delta/4.
  const TrendReport h =
      mollification_convergence(field1("1 + IND(x1 >= 0)", "0"), MollifierKernel::Kind::box, deltas, tests, sigmas, K, Q);
  for (std::size_t i = 0; i < deltas.size(); ++i) CHECK(h.gaps[i] == doctest::Approx(deltas[i] / 8.0).epsilon(0.05));
  CHECK(h.slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(h.passed);

  for (auto kind : {MollifierKernel::Kind::box, MollifierKernel::Kind::triangular, MollifierKernel::Kind::quartic}) {
    const TrendReport l = mollification_convergence(field1("2 + sin(x1)", "cos(x1)"), kind, deltas, tests, sigmas, K, Q);
    for (std::size_t i = 0; i < deltas.size(); ++i) CHECK(l.gaps[i] <= deltas[i]);
  }

  CHECK_THROWS_AS(mollification_convergence(field1("1", "0"), MollifierKernel::Kind::box, deltas, tests, sigmas, K,
                                            cube1(-1.5, 1.5)),
                  ConfigError);
  CHECK_THROWS_AS(mollification_convergence(field1("1", "0", 0), MollifierKernel::Kind::box, deltas, tests, sigmas, K, Q),
                  ConfigError);
}

TEST_CASE("uniform cloud") {
  const DiscreteMeasure u = uniform_cloud(Cube{{0.0, -1.0}, {1.0, 1.0}}, 4);
  CHECK(u.size() == 16);
  CHECK(u.mass() == doctest::Approx(1.0));
  CHECK(moment(u, 1.0, {MomentKind::component, 0}) == doctest::Approx(0.5));
  CHECK(u.coord(0, 0) == doctest::Approx(0.125));
  CHECK(u.coord(0, 1) == doctest::Approx(-0.75));
}

}  // TEST_SUITE
