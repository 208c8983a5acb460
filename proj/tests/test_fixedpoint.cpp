#include <doctest.h>

#include <cmath>

#include "kolmofix/error.hpp"
#include "kolmofix/fixedpoint.hpp"
#include "kolmofix/problem.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;

TEST_SUITE("fixedpoint") {

TEST_CASE("cubic interaction collapses to the origin") {
  const Problem p = parse_problem(preset("cubic-interaction").text);
  const SolveReport r = picard_solve(*p.field, p.initial_measure(), p.picard);
  CHECK(r.status == SolveStatus::converged);
  CHECK(moment(r.final_measure, 1.0) <= 0.05);
  CHECK(r.final_measure.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.in_PR);
  CHECK(r.iterates.back().distance <= p.picard.tol);
  for (const auto& it : r.iterates) CHECK(it.distance >= 0.0);
}

TEST_CASE("compact-support diffusion has a centred solution") {
  const Problem p = parse_problem(preset("compact-support-diffusion").text);
  const SolveReport r = picard_solve(*p.field, p.initial_measure(), p.picard);
  CHECK(r.status == SolveStatus::converged);
  CHECK(std::abs(mean(r.final_measure)) <= 0.02);
  CHECK(moment(r.final_measure, 2.0) <= 1.05);
}

TEST_CASE("measure-independent field needs one solve") {
  const auto ou = field1("1", "-x1");
  PicardConfig cfg;
  cfg.axes = {Axis{-8.0, 8.0, 400}};
  const SolveReport r = picard_solve(*ou, gaussian_sample(1, 1000, 2.0, 0.5, 1), cfg);
  CHECK(r.status == SolveStatus::converged);
  REQUIRE(r.iterates.size() == 1);
  CHECK(r.iterates[0].distance <= cfg.tol);
  CHECK(moment(r.final_measure, 2.0) == doctest::Approx(1.0).epsilon(1e-3));
  REQUIRE(r.final_grid);
}

TEST_CASE("damped update keeps unit mass") {
  const auto f = field1("1", "INT(y1) / 2 - x1");
  PicardConfig cfg;
  cfg.axes = {Axis{-8.0, 8.0, 200}};
  cfg.max_iter = 6;
  cfg.tol = 1e-12;
  const SolveReport r = picard_solve(*f, gaussian_sample(1, 500, 1.0, 1.0, 2), cfg);
  CHECK(r.status == SolveStatus::max_iter);
  CHECK(r.final_measure.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.iterates[0].theta == 1.0);
  for (std::size_t k = 1; k < r.iterates.size(); ++k) CHECK(r.iterates[k].theta <= cfg.theta);
}

TEST_CASE("escaping iterates are flagged") {
  const auto f = field1("1", "2 * INT(y1) + 3 - x1");
  PicardConfig cfg;
  cfg.backend = Backend::particle;
  cfg.sde.particles = 512;
  cfg.sde.T = 10.0;
  cfg.sde.burn_in = 2.0;
  cfg.sde.dt = 1e-2;
  cfg.sde.snapshots = 20;
  cfg.R = 0.1;
  cfg.max_iter = 20;
  const SolveReport r = picard_solve(*f, delta(0.0), cfg);
  CHECK(r.status == SolveStatus::diverged);
}

TEST_CASE("inner failures name the iteration") {
  const auto f = field1("x1 * IND(x1 >= 0)", "INT(2*y1) - x1", 0);
  PicardConfig cfg;
  cfg.backend = Backend::closed;
  cfg.axes = {Axis{-2.0, 2.0, 40}};
  CHECK_THROWS_WITH_AS(picard_solve(*f, delta(1.0), cfg), doctest::Contains("iteration"), SolverError);
  PicardConfig bad;
  bad.theta = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("truncated operator") {
  const FieldPtr f = field1("1 + MOM(2, abs)", "INT(y1) - x1");
  const Function V = Function::parse("x1^2/2");
  TruncationScheme s;
  s.n = 2;
  s.Lambda = 1.5;
  const FieldPtr t = build_truncated_operator(f, s, V);
  const DiscreteMeasure mu = atoms1({-1.0, 0.5, 4.0}, {0.3, 0.3, 0.4});
  const auto frozen = t->freeze(mu);
  const auto plain = f->freeze(compensate_truncate(mu, s));
  const Function u = Function::parse("x1^3 + sin(x1)");
  for (double x : {-1.9, 0.0, 1.5}) {
    CHECK(frozen->generator(u.jet(&x, 1), &x) == doctest::Approx(plain->generator(u.jet(&x, 1), &x)));
  }
  for (double x : {-3.5, 3.01, 7.0}) {
    CHECK(frozen->generator(u.jet(&x, 1), &x) == doctest::Approx(-s.Lambda * V(&x, 1)));
  }
  CHECK(frozen->radius() == 3.0);

  const DiscreteMeasure inside = atoms1({-1.0, 0.5}, {0.5, 0.5});
  const DiscreteMeasure nu = compensate_truncate(inside, s);
  CHECK(nu.mass() == doctest::Approx(1.0));
  CHECK(wasserstein_1d(nu, inside) == doctest::Approx(0.0));
}

TEST_CASE("single-level localized solve is one truncated solve") {
  Problem p = parse_problem(preset("cubic-interaction").text);
  LocalizedConfig loc;
  loc.levels = {4};
  const SolveReport lr = localized_solve(p.field, p.lyap, p.initial_measure(), loc, p.picard);
  REQUIRE(lr.levels.size() == 1);

  TruncationScheme s;
  s.n = 4;
  s.Lambda = p.lyap.Lambda;
  PicardConfig c = p.picard;
  c.V = p.lyap.V;
  for (Axis& ax : c.axes) {
    const double w = ax.width();
    ax.lower = std::max(ax.lower, -5.0);
    ax.upper = std::min(ax.upper, 5.0);
    ax.cells = static_cast<int>(std::llround((ax.upper - ax.lower) / w));
  }
  const SolveReport single = picard_solve(*build_truncated_operator(p.field, s, p.lyap.V), p.initial_measure(), c);
  CHECK(lr.final_measure.coords() == single.final_measure.coords());
  CHECK(lr.final_measure.weights() == single.final_measure.weights());
  CHECK(lr.levels[0].v_moment == lyapunov_integral(single.final_measure, p.lyap.V));
}

TEST_CASE("localized OU matches the untruncated solution") {
  const auto ou = field1("1", "-x1");
  LyapunovSpec lyap;
  lyap.V = Function::parse("x1^2/2");
  lyap.C = 1.0;
  lyap.Lambda = 2.0;
  PicardConfig cfg;
  cfg.axes = {Axis{-8.0, 8.0, 400}};
  LocalizedConfig loc;
  loc.levels = {8};
  const SolveReport t = localized_solve(ou, lyap, delta(0.0), loc, cfg);
  const SolveReport u = picard_solve(*ou, delta(0.0), cfg);
  REQUIRE(t.final_grid);
  REQUIRE(u.final_grid);
  double l1 = 0.0;
  for (std::size_t c = 0; c < u.final_grid->cells(); ++c) {
    l1 += std::abs(t.final_grid->values()[c] - u.final_grid->values()[c]) * u.final_grid->cell_volume();
  }
  CHECK(l1 <= 1e-3);
  CHECK(t.bound_ok);
}

}  // TEST_SUITE
