#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "twistcoh/gamma_series.hpp"

using namespace twistcoh;

TEST_CASE("family has eight members and two obstruction-free combinations") {
  const auto family = closed_form_family();
  REQUIRE(family.size() == 8);
  CHECK(family[0].name == "k1c1");
  CHECK(family[6].name == "k2c1-2k2c2");
  CHECK(std::abs(*family[6].series.obstruction(1.0)) <= 1e-15);
  CHECK(std::abs(*family[7].series.obstruction(1.0)) <= 1e-15);
  CHECK(std::abs(*family[2].series.obstruction(1.0) - oracle::kInvSqrt2Pi) <= 1e-15);
  CHECK_FALSE(family[0].series.obstruction(1.0).has_value());
}

TEST_CASE("mellin against Lanczos Gamma") {
  const GammaSeries g({{1.5, 2.0, 1.0}, {-0.5, 3.0, 2.5}});
  for (double c : {-1.5, -0.5, 0.0, 0.7, 2.0}) {
    const auto exact = 1.5 * oracle::mellin_monomial(2.0, 1.0, c) -
                       0.5 * oracle::mellin_monomial(3.0, 2.5, c);
    REQUIRE(g.mellin(c).has_value());
    CHECK(std::abs(*g.mellin(c) - exact) <= 1e-13 * std::abs(exact) + 1e-15);
  }
  CHECK_FALSE(g.mellin(-2.0).has_value());
}

TEST_CASE("weighted_norm against Simpson in x") {
  const GammaSeries g({{1.0, 2.0, 1.0}, {-2.0, 2.0, 2.0}});
  for (double a : {0.0, 0.5, 1.5}) {
    const double brute = std::sqrt(oracle::simpson(
        [&](double x) {
          const double r = std::exp(-x);
          return std::norm(g(r)) * std::exp(2.0 * a * x);
        },
        -8.0, 60.0));
    CHECK(*g.weighted_norm(a) == doctest::Approx(brute).epsilon(1e-10));
  }
  CHECK_FALSE(g.weighted_norm(2.0).has_value());
}

TEST_CASE("apply_X matches -r d/dr by central differences") {
  const GammaSeries g({{1.0, 2.0, 1.0}, {0.25, 3.0, 2.0}});
  const auto xg = g.apply_X();
  for (double r : {0.1, 0.7, 2.0, 5.0}) {
    const double h = 1e-5 * r;
    const auto deriv = (g(r + h) - g(r - h)) / (2.0 * h);
    CHECK(std::abs(xg(r) + r * deriv) <= 1e-8);
  }
}

TEST_CASE("semigroup_solution against direct quadrature") {
  const GammaSeries g({{1.0, 3.0, 1.0}, {-0.5, 4.0, 2.0}});
  for (double m : {1.0, 2.0}) {
    const auto f = g.semigroup_solution(m);
    REQUIRE(f.has_value());
    for (double r : {0.05, 0.5, 1.0, 3.0}) {
      const double brute = oracle::resolvent_at(g, m, r);
      CHECK(std::real((*f)(r)) == doctest::Approx(brute).epsilon(1e-9));
    }
  }
  const GammaSeries r2({{1.0, 2.0, 1.0}});
  const auto f = r2.semigroup_solution(1.0);
  REQUIRE(f.has_value());
  REQUIRE(f->terms().size() == 1);
  CHECK(f->terms()[0].k == 1.0);
  CHECK(f->terms()[0].coef == std::complex<double>(1.0));
  CHECK_FALSE(GammaSeries({{1.0, 2.5, 1.0}}).semigroup_solution(1.0).has_value());
}

TEST_CASE("parse_gamma_series") {
  const auto g = parse_gamma_series("(1, 2, 1); (-2, 2, 2)");
  REQUIRE(g.terms().size() == 2);
  CHECK(g.terms()[1].coef == std::complex<double>(-2.0));
  CHECK(g.terms()[1].c == 2.0);
  for (const char* bad : {"", "(1, 2)", "(1, 2, 0)", "(1, 2, -1)", "(1, 2, 1", "(a, 2, 1)"}) {
    CAPTURE(bad);
    try {
      (void)parse_gamma_series(bad);
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ConfigError);
    }
  }
}

TEST_CASE("arithmetic") {
  const GammaSeries a({{1.0, 1.0, 1.0}});
  const GammaSeries b({{2.0, 2.0, 1.0}});
  for (double r : {0.3, 1.0, 4.0}) {
    CHECK(std::abs((a + b)(r) - (a(r) + b(r))) <= 1e-15);
    CHECK(std::abs((a - b)(r) - (a(r) - b(r))) <= 1e-15);
    CHECK(std::abs(a.times_power(2.0)(r) - r * r * a(r)) <= 1e-15);
  }
  CHECK(GammaSeries().to_string() == "0");
}
