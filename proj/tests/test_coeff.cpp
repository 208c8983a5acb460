#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>

#include "kolmofix/error.hpp"
#include "kolmofix/expr.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;

namespace {

std::array<double, 2> coeffs_at(const CoefficientField& f, const DiscreteMeasure& mu, double x) {
  std::array<double, kMaxDim * kMaxDim> a{};
  std::array<double, kMaxDim> b{};
  f.freeze(mu)->at(&x, a.data(), b.data());
  return {a[0], b[0]};
}

Cube cube1(double lo, double hi) { return Cube{{lo}, {hi}}; }

}  // namespace

TEST_SUITE("coeff") {

TEST_CASE("parser accepts the example formulas") {
  const Expr a = parse_expr("x1^2 * MOM(1,abs)^3");
  CHECK(uses_measure(a));
  CHECK(max_coord(a) == 0);
  const Expr b = parse_expr("INT(2*y1) - x1");
  CHECK(uses_measure(b));
  CHECK(a->op == Op::mul);
  CHECK(b->op == Op::sub);
  CHECK(b->args[0]->op == Op::integral);
  const Expr h = parse_expr("x1 * IND(x1 >= 0)");
  CHECK_FALSE(uses_measure(h));
  CHECK(h->args[1]->op == Op::ind);
}

TEST_CASE("parser reports position") {
  CHECK_THROWS_AS(parse_expr("x1 +"), ParseError);
  CHECK_THROWS_AS(parse_expr("foo(x1)"), ParseError);
  CHECK_THROWS_AS(parse_expr("y1 + 1"), ParseError);
  CHECK_THROWS_AS(parse_expr("INT(INT(y1))"), ParseError);
  try {
    parse_expr("x1 * (2 + ");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.column >= 10);
  }
}

TEST_CASE("print and parse round trip") {
  for (const char* text : {"x1^2 * MOM(1,abs)^3", "INT(2*y1) - x1", "x1 * IND(x1 >= 0)", "-x1 - x2 + 0.5*INT(y2)",
                           "max(0, 1 - abs(x1))", "0.5 * INT((x1 - 2*y1)^2)", "exp(-x1^2/2) / sqrt(2*pi)",
                           "MOM(2, radial) + MOM(1, c2)", "min(x1, x2) ^ -2 ^ 0.5", "sin(cos(log(1 + x1^2)))"}) {
    CAPTURE(text);
    const Expr e = parse_expr(text);
    const Expr again = parse_expr(to_string(e));
    CHECK(equal(e, again));
    CHECK(to_string(again) == to_string(e));
  }
}

TEST_CASE("coefficient evaluation") {
  const auto cubic = field1("x1^2 * MOM(1,abs)^3", "-2 * x1^3 * MOM(1,abs)", 0);
  CHECK(coeffs_at(*cubic, two_point(), 2.0)[0] == doctest::Approx(4.0));
  CHECK(coeffs_at(*cubic, two_point(), 1.0)[1] == doctest::Approx(-2.0));
  const auto half = field1("x1 * IND(x1 >= 0)", "INT(2*y1) - x1", 0);
  CHECK(coeffs_at(*half, two_point(), -3.0)[0] == 0.0);
  CHECK(coeffs_at(*half, delta(1.0), 0.5)[1] == doctest::Approx(1.5));
  const auto bad = field1("1", "1 / (x1 - 1)", 1);
  CHECK_THROWS_AS(coeffs_at(*bad, two_point(), 1.0), EvalError);
}

TEST_CASE("evaluation is pure") {
  const auto f = field1("x1^2 * MOM(1,abs)^3 + 0.1", "INT(sin(y1) * x1)", 1);
  const DiscreteMeasure mu = gaussian_sample(1, 300, 0.0, 1.0, 5);
  for (double x : {-1.3, 0.0, 0.77}) {
    const auto p = coeffs_at(*f, mu, x);
    const auto q = coeffs_at(*f, mu, x);
    CHECK(std::memcmp(p.data(), q.data(), sizeof(p)) == 0);
  }
}

TEST_CASE("check_H11") {
  const std::vector<DiscreteMeasure> mus{two_point(), delta(0.3)};
  const auto id = field1("1", "-x1", 1);
  CHECK(check_H11(*id, cube1(-2, 2), mus, 21).lambda_est == doctest::Approx(1.0));

  const auto langevin = field2({"1", "", "", ""}, {"-x1 - x2", "x1"}, 1);
  const Cube K2{{-1, -1}, {1, 1}};
  const AssumptionReport lr = check_H11(*langevin, K2, {DiscreteMeasure::dirac({0, 0})}, 11);
  CHECK(lr.passed);
  CHECK(lr.lambda_est == doctest::Approx(1.0));

  const auto cubic = field1("x1^2 * MOM(1,abs)^3", "-2 * x1^3 * MOM(1,abs)", 1);
  const AssumptionReport cr = check_H11(*cubic, cube1(1, 2), {two_point(), delta(1.0), delta(-1.0)}, 41);
  CHECK(cr.passed);
  CHECK(cr.lambda_est == doctest::Approx(1.0));

  const AssumptionReport degenerate = check_H11(*cubic, cube1(-1, 1), {two_point()}, 41);
  CHECK_FALSE(degenerate.passed);
  REQUIRE_FALSE(degenerate.violations.empty());
  CHECK(degenerate.violations.back().x == std::vector<double>{0.0});

  const auto flat = field1("0", "-x1", 0);
  const AssumptionReport m0 = check_H11(*flat, cube1(-1, 1), {two_point()}, 5);
  CHECK(m0.passed);
  CHECK_FALSE(m0.notes.empty());
}

TEST_CASE("check_H12") {
  const auto f = field1("1 + x1^2", "-x1", 1);
  const AssumptionReport r = check_H12(*f, cube1(-2, 2), {two_point()}, 41);
  CHECK(r.passed);
  CHECK(r.sup_bound_est == doctest::Approx(7.0));
  const auto bad = field1("1", "log(abs(x1))", 1);
  const AssumptionReport rb = check_H12(*bad, cube1(-1, 1), {two_point()}, 21);
  CHECK_FALSE(rb.passed);
  CHECK_FALSE(rb.violations.empty());
}

TEST_CASE("check_H13") {
  const auto constant = field1("2", "1", 0);
  const AssumptionReport rc = check_H13(*constant, cube1(-1, 1), {two_point()}, 2000);
  CHECK(rc.passed);
  for (const auto& [h, env] : rc.modulus_samples) CHECK(env == 0.0);

  const auto lip = field1("0", "INT(2*y1) - x1", 0);
  const AssumptionReport rl = check_H13(*lip, cube1(-1, 1), {two_point(), delta(0.5)}, 4000);
  CHECK(rl.passed);
  REQUIRE(rl.modulus_samples.size() > 10);
  double prev = 0.0;
  for (const auto& [h, env] : rl.modulus_samples) {
    CHECK(h >= prev);
    prev = h;
    CHECK(env <= h * (1.0 + 1e-9));
    CHECK(env >= 0.6 * h);
  }

  const auto jump = field1("1 + IND(x1 >= 0.1)", "0", 0);
  const AssumptionReport rj = check_H13(*jump, cube1(-1, 1), {two_point()}, 2000);
  CHECK_FALSE(rj.passed);
  REQUIRE_FALSE(rj.violations.empty());
  CHECK(std::abs(rj.violations[0].x[0] - 0.1) < 1e-3);

  const auto full = field1("1", "-x1", 1);
  CHECK(check_H13(*full, cube1(-1, 1), {two_point()}, 100).passed);
}

TEST_CASE("mollify") {
  MollifierKernel k;
  k.delta = 0.5;
  const FieldPtr constant = field1("3", "-1", 1);
  const FieldPtr mc = mollify(constant, k);
  for (double x : {-1.0, 0.0, 0.4}) {
    CHECK(coeffs_at(*mc, two_point(), x)[0] == doctest::Approx(3.0));
    CHECK(coeffs_at(*mc, two_point(), x)[1] == doctest::Approx(-1.0));
  }
  for (auto kind : {MollifierKernel::Kind::box, MollifierKernel::Kind::triangular, MollifierKernel::Kind::quartic}) {
    k.kind = kind;
    const FieldPtr lin = mollify(field1("1", "x1", 1), k);
    for (double x : {-0.7, 0.0, 1.3}) CHECK(coeffs_at(*lin, two_point(), x)[1] == doctest::Approx(x).epsilon(1e-12));
  }
  k.kind = MollifierKernel::Kind::box;
  const FieldPtr heav = mollify(field1("1 + IND(x1 >= 0)", "0", 1), k);
  CHECK(coeffs_at(*heav, two_point(), 0.0)[0] == doctest::Approx(1.5));
  double l1 = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + (i + 0.5) * 2.0 / n;
    l1 += std::abs(coeffs_at(*heav, two_point(), x)[0] - (1.0 + (x >= 0 ? 1.0 : 0.0))) * 2.0 / n;
  }
  CHECK(l1 == doctest::Approx(k.delta / 4.0).epsilon(0.02));

  std::string warning;
  const FieldPtr m0 = field1("1", "x1", 0);
  CHECK(mollify(m0, k, &warning) == m0);
  CHECK_FALSE(warning.empty());
}

TEST_CASE("mollify keeps the ellipticity bound and the sup bound") {
  MollifierKernel k;
  k.delta = 0.25;
  const FieldPtr f = field1("1 + abs(x1) + IND(x1 >= 0.5)", "sin(3*x1)", 1);
  const FieldPtr g = mollify(f, k);
  const std::vector<DiscreteMeasure> mus{two_point()};
  CHECK(check_H11(*g, cube1(-1.0 + k.delta, 1.0 - k.delta), mus, 41).lambda_est >=
        check_H11(*f, cube1(-1.0, 1.0), mus, 41).lambda_est - 1e-12);
  CHECK(check_H12(*g, cube1(-1.0, 1.0), mus, 41).sup_bound_est <=
        check_H12(*f, cube1(-1.0 - k.delta, 1.0 + k.delta), mus, 401).sup_bound_est + 1e-12);
}

}  // TEST_SUITE
