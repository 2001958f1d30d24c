#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "twistcoh/halfline.hpp"

using namespace twistcoh;

namespace {

HalfLineFunction gaussian_in_x(const LogGrid& grid) {
  return sample_in_x([](double x) { return std::exp(-0.5 * x * x); }, grid);
}

}  // namespace

TEST_CASE("make_log_grid spacing and node order") {
  const auto g = make_log_grid(16, -1.0, 1.0);
  CHECK(g.spacing() == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(15) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t j = 1; j < g.size(); ++j) CHECK(g.r(j) < g.r(j - 1));

  const auto wide = make_log_grid(4096, -12.0, 12.0);
  CHECK(wide.spacing() == doctest::Approx(24.0 / 4095.0));
  CHECK(wide.spacing() == doctest::Approx(0.00586).epsilon(1e-3));
}

TEST_CASE("make_log_grid rejects bad input") {
  CHECK_THROWS_AS(make_log_grid(8, 0.0, 1.0), Error);
  try {
    make_log_grid(8, 0.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidGrid);
  }
  CHECK_THROWS_AS(make_log_grid(32, 1.0, 1.0), Error);
  CHECK_THROWS_AS(make_log_grid(32, 2.0, 1.0), Error);
  CHECK_THROWS_AS(make_log_grid(32, 0.0, INFINITY), Error);
}

TEST_CASE("default grid") {
  const auto g = default_grid();
  CHECK(g.size() == 4096);
  CHECK(g.x_min() == -8.0);
  CHECK(g.x_max() == doctest::Approx(56.0));
  CHECK(g.period() == doctest::Approx(4096 * g.spacing()));
}

TEST_CASE("sample") {
  const auto grid = default_grid();
  const auto zero = sample([](double) { return 0.0; }, grid);
  CHECK(zero.max_abs() == 0.0);

  const auto f = sample([](double r) { return r * std::exp(-r); }, grid);
  CHECK(f.size() == grid.size());
  CHECK(f[100] == std::complex<double>(grid.r(100) * std::exp(-grid.r(100))));
  CHECK(decay_admissible(f, 0.0));

  const auto tiny = make_log_grid(16, 0.0, 800.0);
  try {
    (void)sample([](double r) { return 1.0 / r; }, tiny);
    FAIL("expected NonFiniteSample");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteSample);
  }
}

TEST_CASE("weighted_norm of a Gaussian in x") {
  const auto grid = default_grid();
  const auto f = gaussian_in_x(grid);
  const double quarter_pi = std::pow(std::numbers::pi, 0.25);
  CHECK(std::abs(weighted_norm(f, 0.0) / quarter_pi - 1.0) <= 1e-8);
  CHECK(std::abs(weighted_norm(f, 1.0) / (std::exp(0.5) * quarter_pi) - 1.0) <= 1e-8);
  CHECK(weighted_norm(HalfLineFunction(grid), 3.0) == 0.0);
}

TEST_CASE("weighted_norm of r e^{-r} matches the Gamma integral") {
  const auto grid = default_grid();
  const auto f = sample([](double r) { return r * std::exp(-r); }, grid);
  for (double a : {0.0, 0.25, 0.5}) {
    // ∫ r^{2-2a} e^{-2r} dr / r
    const double exact = std::sqrt(oracle::gamma_integral(2.0 - 2.0 * a, 2.0));
    CHECK(weighted_norm(f, a) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("weighted_norm saturates without NaN") {
  const auto grid = default_grid();
  const auto f = sample([](double) { return 1.0; }, grid);
  const double w = weighted_norm(f, 400.0);
  CHECK(std::isinf(w));
  CHECK(weighted_norm(f, -1.0) > 0.0);
}

TEST_CASE("lin_comb") {
  const auto grid = default_grid();
  const auto f = sample([](double r) { return r * std::exp(-r); }, grid);
  const auto g = sample([](double r) { return r * r * std::exp(-2 * r); }, grid);
  CHECK(relative_distance(lin_comb(1.0, f, 0.0, g), f) == 0.0);
  CHECK(lin_comb(1.0, f, -1.0, f).max_abs() == 0.0);
  const auto minus2f = lin_comb(-2.0, f, 0.0, f);
  CHECK(lin_comb(2.0, f, 1.0, minus2f).max_abs() == 0.0);

  const auto other = make_log_grid(4096, -8.0, 50.0);
  try {
    (void)lin_comb(1.0, f, 1.0, HalfLineFunction(other));
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }
}

TEST_CASE("decay_admissible") {
  const auto grid = default_grid();
  const auto f = sample([](double r) { return r * std::exp(-r); }, grid);
  CHECK(decay_admissible(f, 0.0));
  CHECK(decay_admissible(f, 0.5));
  CHECK_FALSE(decay_admissible(f, 1.0));  // f r^{-1} = e^{-r} does not vanish as r -> 0
  CHECK(decay_admissible(HalfLineFunction(grid), 1.0));
  const auto flat = sample([](double) { return 1.0; }, grid);
  CHECK_FALSE(decay_admissible(flat, 0.0));
}

TEST_CASE("relative_distance and inner") {
  const auto grid = default_grid();
  const HalfLineFunction zero(grid);
  CHECK(relative_distance(zero, zero) == 0.0);
  const auto f = sample([](double r) { return r * std::exp(-r); }, grid);
  CHECK(std::abs(inner(f, f) - std::complex<double>(0.25)) <= 1e-12);
  CHECK(relative_distance(zero, f) == doctest::Approx(1.0));
}

TEST_CASE("weight interchange, homogeneity and triangle inequality hold on the family") {
  const auto grid = default_grid();
  std::vector<HalfLineFunction> fs;
  for (double k : {1.0, 2.0, 3.0}) {
    for (double c : {1.0, 2.0}) {
      fs.push_back(sample([=](double r) { return std::pow(r, k) * std::exp(-c * r); }, grid));
    }
  }
  fs.push_back(gaussian_in_x(grid));
  const double as[] = {0.0, 0.2, 0.5, 0.8, 1.0};
  for (const auto& f : fs) {
    for (double a : as) {
      for (double b : as) {
        if (b > a) continue;
        CHECK(weighted_norm(f, b) <=
              (weighted_norm(f, a) + weighted_norm(f, 0.0)) * (1.0 + 1e-10));
      }
      const std::complex<double> alpha(-1.5, 2.0);
      const double scaled = weighted_norm(lin_comb(alpha, f, 0.0, f), a);
      CHECK(scaled == doctest::Approx(std::abs(alpha) * weighted_norm(f, a)).epsilon(1e-14));
    }
  }
  for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
    for (double a : as) {
      const double lhs = weighted_norm(lin_comb(1.0, fs[i], 1.0, fs[i + 1]), a);
      CHECK(lhs <= (weighted_norm(fs[i], a) + weighted_norm(fs[i + 1], a)) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("integrate_dx is exact for the trapezoid of a line") {
  const auto grid = make_log_grid(16, 0.0, 1.5);
  std::vector<std::complex<double>> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = 2.0 * grid.x(j) + 1.0;
  // ∫_0^{1.5} (2x + 1) dx = 2.25 + 1.5
  CHECK(std::abs(integrate_dx(grid, v) - std::complex<double>(3.75)) <= 1e-13);
}
