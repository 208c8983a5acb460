#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kolmofix/expr.hpp"
#include "kolmofix/frozen.hpp"
#include "kolmofix/lyapunov.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> pos(-5.0, 5.0), w(0.1, 1.0);
  const int n = count(rng);
  std::vector<double> xs, ws;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    xs.push_back(pos(rng));
    ws.push_back(w(rng));
    total += ws.back();
  }
  for (double& v : ws) v /= total;
  return atoms1(xs, ws);
}

std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 2);
  std::uniform_real_distribution<double> num(-3.0, 3.0);
  std::ostringstream os;
  switch (pick(rng)) {
    case 0: os << "x1"; break;
    case 1: os << "x2"; break;
    case 2: os.precision(17); os << std::abs(num(rng)); break;
    case 3: os << "(" << random_expr(rng, depth - 1) << " + " << random_expr(rng, depth - 1) << ")"; break;
    case 4: os << "(" << random_expr(rng, depth - 1) << " - " << random_expr(rng, depth - 1) << ")"; break;
    case 5: os << random_expr(rng, depth - 1) << " * " << random_expr(rng, depth - 1); break;
    case 6: os << "sin(" << random_expr(rng, depth - 1) << ")"; break;
    case 7: os << "-" << random_expr(rng, depth - 1); break;
    case 8: os << "(" << random_expr(rng, depth - 1) << ")^2"; break;
    default: os << "INT(" << random_expr(rng, 0) << " * y1)"; break;
  }
  return os.str();
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("W1 is a metric on random triples") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 1000; ++t) {
    const DiscreteMeasure p = random_measure(rng), q = random_measure(rng), r = random_measure(rng);
    const double pq = wasserstein_1d(p, q), qp = wasserstein_1d(q, p);
    CHECK(pq >= 0.0);
    CHECK(wasserstein_1d(p, p) == 0.0);
    CHECK(std::abs(pq - qp) <= 1e-12 * (1.0 + pq));
    CHECK(wasserstein_1d(p, r) <= pq + wasserstein_1d(q, r) + 1e-12);
  }
}

TEST_CASE("compensated truncation keeps unit mass") {
  std::mt19937_64 rng(5);
  for (int n : {1, 2, 4}) {
    TruncationScheme s;
    s.n = n;
    for (int t = 0; t < 200; ++t) {
      const DiscreteMeasure nu = compensate_truncate(random_measure(rng), s);
      CHECK(std::abs(nu.mass() - 1.0) <= 1e-12);
      for (double c : nu.coords()) CHECK(std::abs(c) <= n + 1);
    }
  }
}

TEST_CASE("the generator is linear") {
  const auto f = field2({"1 + x1^2", "0.3", "", "2"}, {"-x1 + INT(y1)", "x1 - x2"}, 2);
  const Function u = Function::parse("sin(x1) * x2^2");
  const Function v = Function::parse("exp(-x1^2) + x1 * x2");
  const Function w = Function::parse("2.5 * (sin(x1) * x2^2) - 1.5 * (exp(-x1^2) + x1 * x2)");
  const auto clouds = random_clouds(2, 20, 8, 2.0, 9);
  for (const auto& mu : clouds) {
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double* x = mu.point(k);
      const double lu = apply_generator(*f, mu, u, x), lv = apply_generator(*f, mu, v, x);
      const double lw = apply_generator(*f, mu, w, x);
      CHECK(std::abs(lw - (2.5 * lu - 1.5 * lv)) <= 1e-12 * (1.0 + std::abs(lu) + std::abs(lv)));
    }
  }
}

TEST_CASE("print then parse is idempotent") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 500; ++t) {
    const std::string text = random_expr(rng, 4);
    CAPTURE(text);
    const Expr e = parse_expr(text);
    const std::string once = to_string(e);
    const Expr again = parse_expr(once);
    CHECK(equal(e, again));
    CHECK(to_string(again) == once);
  }
}

TEST_CASE("OU particle residual shrinks at first order in dt") {
  const auto ou = field1("1", "-x1");
  const auto frozen = ou->freeze(delta(0.0));
  const auto battery = default_battery(1);
  std::vector<double> dts{0.2, 0.1, 0.05}, res;
  for (double dt : dts) {
    SdeConfig cfg;
    cfg.dt = dt;
    cfg.T = 300.0;
    cfg.burn_in = 10.0;
    cfg.particles = 4000;
    cfg.snapshots = 100;
    cfg.seed = 8;
    res.push_back(weak_residual(solve_ergodic(*frozen, delta(0.0), cfg).measure, *frozen, battery).max_abs);
  }
  const double order = std::log(res.front() / res.back()) / std::log(dts.front() / dts.back());
  CAPTURE(res[0]);
  CAPTURE(res[1]);
  CAPTURE(res[2]);
  CHECK(order >= 0.9);
}

}  // TEST_SUITE
