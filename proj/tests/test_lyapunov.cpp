#include <doctest.h>

#include <cmath>
#include <random>

#include "kolmofix/lyapunov.hpp"
#include "support.hpp"

using namespace kolmofix;
using namespace kfx_test;

namespace {

const char* kCubicA = "x1^2 * MOM(1,abs)^3";
const char* kCubicB = "-2 * x1^3 * MOM(1,abs)";
const char* kW = "0.5 * INT((x1 - 2*y1)^2)";

std::vector<std::vector<double>> line(double lo, double hi, int n) {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < n; ++i) pts.push_back({lo + (hi - lo) * i / (n - 1)});
  return pts;
}

}  // namespace

TEST_SUITE("lyapunov") {

TEST_CASE("apply_generator") {
  const auto cubic = field1(kCubicA, kCubicB, 0);
  const Function V = Function::parse("x1^2/2");
  const DiscreteMeasure mu = atoms1({-0.5, 2.0}, {0.5, 0.5});
  const double J = moment(mu, 1.0);
  for (double x : {-1.5, 0.0, 0.7, 3.0}) {
    CHECK(apply_generator(*cubic, mu, Function::parse("4.2"), &x) == 0.0);
    CHECK(apply_generator(*cubic, mu, V, &x) == doctest::Approx(x * x * J * J * J - 2.0 * std::pow(x, 4) * J));
  }
  const auto transport = field1("0", "INT(2*y1) - x1", 0);
  const double one = 1.0;
  CHECK(apply_generator(*transport, delta(1.0), Function::parse(kW), &one) == doctest::Approx(-1.0));
}

TEST_CASE("check_pointwise") {
  const auto ou = field1("1", "-x1");
  const Function V = Function::parse("x1^2/2");
  const auto pts = line(-8, 8, 161);
  CHECK(check_pointwise(*ou, V, 1.0, 1.0, pts, {delta(0.0)}).passed);

  const auto cubic = field1(kCubicA, kCubicB, 0);
  const CheckReport r = check_pointwise(*cubic, V, 10.0, 0.5, pts, {delta(0.0)});
  CHECK_FALSE(r.passed);
  REQUIRE_FALSE(r.witnesses.empty());
  CHECK(std::abs(r.witnesses[0].x[0]) > 6.0);

  const auto compact = field1("max(0, 1 - abs(x1))", "INT(2*y1) - x1", 0);
  std::vector<DiscreteMeasure> diracs = dirac_family(line(-4, 4, 81));
  const SweepReport s = sweep_pointwise(*compact, Function::parse("x1^2"), default_C_sweep(), default_Lambda_sweep(),
                                        line(-4, 4, 81), diracs);
  CHECK_FALSE(s.any_passed);
  CHECK(s.all_failed_with_witness);
  CHECK(s.entries.size() == default_C_sweep().size() * default_Lambda_sweep().size());
}

TEST_CASE("check_integral") {
  const Function V = Function::parse("x1^2/2");
  LyapunovSpec cubic_spec;
  cubic_spec.V = V;
  cubic_spec.W = V;
  cubic_spec.C = 3.0;
  cubic_spec.Lambda = 2.0;
  const auto cubic = field1(kCubicA, kCubicB, 0);
  const CheckReport r = check_integral(*cubic, cubic_spec, {two_point()});
  CHECK(r.passed);
  CHECK(r.max_excess == doctest::Approx(-1.0 - 2.0));

  LyapunovSpec w_spec;
  w_spec.V = Function::parse("x1^2");
  w_spec.W = Function::parse(kW);
  w_spec.C = 0.0;
  w_spec.Lambda = 1.0;
  const auto transport = field1("0", "INT(2*y1) - x1", 0);
  const CheckReport rt = check_integral(*transport, w_spec, {delta(1.0)});
  CHECK(rt.passed);
  CHECK(rt.max_excess == doctest::Approx(0.0));

  w_spec.C = 0.5;
  w_spec.Lambda = 0.5;
  const auto half = field1("x1 * IND(x1 >= 0)", "INT(2*y1) - x1", 0);
  const CheckReport rh = check_integral(*half, w_spec, {delta(1.0)});
  CHECK(rh.passed);
  CHECK(rh.max_excess == doctest::Approx(0.0));

  LyapunovSpec too_tight = cubic_spec;
  too_tight.C = -5.0;
  const CheckReport bad = check_integral(*cubic, too_tight, {two_point()});
  CHECK_FALSE(bad.passed);
  CHECK_FALSE(bad.witnesses.empty());
}

TEST_CASE("integral LHS agrees with the closed forms") {
  const auto clouds = random_clouds(1, 40, 12, 3.0, 21);
  const auto cubic = field1(kCubicA, kCubicB, 0);
  const auto compact = field1("max(0, 1 - abs(x1))", "INT(2*y1) - x1", 0);
  const auto half = field1("x1 * IND(x1 >= 0)", "INT(2*y1) - x1", 0);
  const Function V = Function::parse("x1^2/2");
  const Function W = Function::parse(kW);
  for (const auto& mu : clouds) {
    const double J = moment(mu, 1.0);
    const double m2 = moment(mu, 2.0);
    const double m4 = moment(mu, 4.0);
    double lhs_cubic = 0.0, lhs_compact = 0.0, lhs_half = 0.0, a_compact = 0.0, pos = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double* x = mu.point(k);
      lhs_cubic += mu.weight(k) * apply_generator(*cubic, mu, V, x);
      lhs_compact += mu.weight(k) * apply_generator(*compact, mu, W, x);
      lhs_half += mu.weight(k) * apply_generator(*half, mu, W, x);
      a_compact += mu.weight(k) * std::max(0.0, 1.0 - std::abs(x[0]));
      pos += mu.weight(k) * std::max(0.0, x[0]);
    }
    CHECK(lhs_cubic == doctest::Approx(J * (m2 * J * J - 2.0 * m4)).epsilon(1e-10));
    CHECK(lhs_compact == doctest::Approx(a_compact - m2).epsilon(1e-10));
    CHECK(lhs_half == doctest::Approx(pos - m2).epsilon(1e-10));
  }
}

TEST_CASE("check_H32") {
  const auto cubic = field1(kCubicA, kCubicB, 0);
  LyapunovSpec spec;
  spec.V = Function::parse("x1^2/2");
  spec.W = spec.V;
  const auto clouds = random_clouds(1, 20, 8, 3.0, 4);
  const CheckReport r = check_H32(*cubic, spec, clouds);
  CHECK(r.passed);
  CHECK(r.max_excess <= 0.0);

  const auto ou = field1("1", "-x1");
  const CheckReport ro = check_H32(*ou, spec, {delta(0.0)});
  CHECK(ro.passed);
  CHECK(ro.max_excess == doctest::Approx(-1.0));

  const auto push = field1("1", "INT(y1^2)");
  LyapunovSpec lin = spec;
  lin.W = Function::parse("x1");
  CHECK(check_H32(*push, lin, clouds).passed);

  LyapunovSpec heavy = spec;
  heavy.H = Function::parse("x1^2");
  heavy.C2 = 1.0;
  const Cube dom{{-8.0}, {8.0}};
  const CheckReport rh = check_H32(*ou, heavy, {delta(0.0)}, &dom);
  CHECK_FALSE(rh.passed);
}

TEST_CASE("verify_moment_bound") {
  const Function V = Function::parse("x1^2/2");
  const DiscreteMeasure gauss = gaussian_grid({Axis{-8.0, 8.0, 800}}, 0.0, 1.0).to_measure();
  CHECK(verify_moment_bound(gauss, V, 1.0, 2.0).passed);
  CHECK(verify_moment_bound(delta(0.0), V, 3.0, 2.0).passed);
  const DiscreteMeasure shifted = gaussian_grid({Axis{-6.0, 12.0, 900}}, 3.0, 1.0).to_measure();
  const CheckReport r = verify_moment_bound(shifted, V, 3.0, 2.0);
  CHECK_FALSE(r.passed);
  CHECK(r.value == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("the separation on the cubic example") {
  const auto cubic = field1(kCubicA, kCubicB, 0);
  const Function V = Function::parse("x1^2/2");
  const auto pts = line(-4, 4, 81);
  std::vector<DiscreteMeasure> family = dirac_family(line(-4, 4, 41));
  family.push_back(delta(0.0));
  const SweepReport s = sweep_pointwise(*cubic, V, default_C_sweep(), default_Lambda_sweep(), pts, family);
  CHECK(s.all_failed_with_witness);
  LyapunovSpec spec;
  spec.V = V;
  spec.W = V;
  spec.C = 3.0;
  spec.Lambda = 2.0;
  const CheckReport r = check_integral(*cubic, spec, random_clouds(1, 100, 16, 3.0, 7));
  CHECK(r.passed);
  CHECK(r.witnesses.empty());
}

TEST_CASE("measure-dependent W against the independent candidates") {
  const auto compact = field1("max(0, 1 - abs(x1))", "INT(2*y1) - x1", 0);
  std::vector<DiscreteMeasure> family = random_clouds(1, 100, 16, 3.0, 7);
  const auto diracs = dirac_family(line(-8, 8, 161));
  family.insert(family.end(), diracs.begin(), diracs.end());
  LyapunovSpec spec;
  spec.V = Function::parse("x1^2");
  spec.W = Function::parse(kW);
  spec.C = 1.0;
  spec.Lambda = 1.0;
  CHECK(check_integral(*compact, spec, family).passed);
  for (const Function& f : independent_candidates(1)) {
    CAPTURE(f.text());
    LyapunovSpec s = spec;
    s.V = f;
    s.W = f;
    for (double C : default_C_sweep()) {
      for (double L : default_Lambda_sweep()) {
        s.C = C;
        s.Lambda = L;
        CHECK_FALSE(check_integral(*compact, s, family).passed);
      }
    }
  }
}

TEST_CASE("random clouds") {
  const auto a = random_clouds(2, 10, 16, 3.0, 5);
  const auto b = random_clouds(2, 10, 16, 3.0, 5);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].coords() == b[i].coords());
    CHECK(a[i].size() <= 16);
    CHECK(a[i].mass() == doctest::Approx(1.0).epsilon(1e-12));
    for (double c : a[i].coords()) CHECK(std::abs(c) <= 3.0);
  }
}

}  // TEST_SUITE
