#include <doctest.h>

#include <cmath>

#include "twistcoh/cocycle.hpp"
#include "twistcoh/gamma_series.hpp"

using namespace twistcoh;

namespace {

struct Dataset {
  GammaSeries h;
  double v, m, m1;
};

CocycleData build(const Dataset& d, const LogGrid& grid) {
  ModelRepParams p;
  p.m = d.m;
  const auto g1 = (std::complex<double>(d.m1, d.v) * d.h).sample(grid);
  const auto g2 = (d.h.apply_X() + std::complex<double>(d.m) * d.h).sample(grid);
  return CocycleData{g1, g2, d.v, d.m, d.m1, p};
}

const Dataset kDatasets[] = {
    {GammaSeries({{1.0, 1.0, 1.0}}), 1.0, 1.0, 0.0},
    {GammaSeries({{1.0, 2.0, 2.0}}), 2.0, 1.0, 1.0},
    {GammaSeries({{1.0, 2.0, 1.0}, {0.5, 3.0, 2.0}}), -1.5, 1.5, 0.5},
};

template <class F>
void expect_error(Errc code, F&& fn) {
  try {
    fn();
    FAIL("expected " << to_string(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("verify_cocycle") {
  const auto grid = default_grid();
  const auto d = build(kDatasets[0], grid);
  CHECK(verify_cocycle(d) <= 1e-7);
  // (X + 1) g1 = i r^2 e^{-r}
  const auto expected = GammaSeries({{std::complex<double>(0, 1), 2.0, 1.0}}).sample(grid);
  CHECK(relative_distance(lin_comb(1.0, apply_X(d.g1), 1.0, d.g1), expected) <= 1e-8);

  CocycleData zero{HalfLineFunction(grid), HalfLineFunction(grid), 1.0, 1.0, 0.0, {}};
  CHECK(verify_cocycle(zero) == 0.0);

  auto bad = d;
  const auto bump = GammaSeries({{1.0, 3.0, 1.0}}).sample(grid);
  bad.g1 = lin_comb(1.0, d.g1, 0.1, bump);
  const double scale = std::max(norm(bad.g1), norm(bad.g2));
  CHECK(verify_cocycle(bad) >= 0.05 * norm(bump) / scale);
}

TEST_CASE("common_solution on the constructed datasets") {
  const auto grid = default_grid();
  for (const auto& ds : kDatasets) {
    CAPTURE(ds.h.to_string());
    const auto d = build(ds, grid);
    const auto sol = common_solution(d);
    CHECK(sol.residual_flow <= 1e-6);
    CHECK(sol.residual_factor <= 1e-6);
    CHECK(relative_distance(sol.report.solution, ds.h.sample(grid)) <= 1e-6);
    CHECK(ds.m * norm(sol.report.solution) <= (1.0 + 1e-8) * norm(d.g2));
  }
}

TEST_CASE("obstruction gate") {
  const auto grid = default_grid();
  // g1 = i r e^{-r} is not regular enough for D(g2) to vanish: D(r^2 e^{-r}) = 1/sqrt(2 pi)
  const auto low = common_solution(build(kDatasets[0], grid));
  CHECK_FALSE(low.obstruction_gate_active);
  CHECK(std::abs(low.report.obstruction) > 0.39);

  const Dataset regular{GammaSeries({{1.0, 3.0, 1.0}}), 1.0, 1.0, 0.0};
  const auto high = common_solution(build(regular, grid));
  CHECK(high.obstruction_gate_active);
  CHECK(high.report.obstruction_vanishes());
}

TEST_CASE("zero data and errors") {
  const auto grid = default_grid();
  CocycleData zero{HalfLineFunction(grid), HalfLineFunction(grid), 1.0, 1.0, 0.0, {}};
  const auto sol = common_solution(zero);
  CHECK(sol.report.solution.max_abs() == 0.0);

  auto d = build(kDatasets[0], grid);
  d.g1 = lin_comb(1.0, d.g1, 0.1, GammaSeries({{1.0, 3.0, 1.0}}).sample(grid));
  expect_error(Errc::IncompatibleCocycle, [&] { (void)common_solution(d); });

  auto v0 = build(kDatasets[0], grid);
  v0.v = 0.0;
  expect_error(Errc::IncompatibleCocycle, [&] { (void)common_solution(v0); });
}

TEST_CASE("linearity of the common solution") {
  const auto grid = default_grid();
  const Dataset a{GammaSeries({{1.0, 2.0, 1.0}}), 1.0, 1.0, 0.5};
  const Dataset b{GammaSeries({{-0.7, 3.0, 2.0}}), 1.0, 1.0, 0.5};
  const Dataset sum{a.h + b.h, 1.0, 1.0, 0.5};
  const auto fa = common_solution(build(a, grid)).report.solution;
  const auto fb = common_solution(build(b, grid)).report.solution;
  const auto fs = common_solution(build(sum, grid)).report.solution;
  CHECK(relative_distance(lin_comb(1.0, fa, 1.0, fb), fs) <= 1e-8);
}

TEST_CASE("cartan_reduce") {
  const auto grid = default_grid();
  const auto g2 = GammaSeries({{1.0, 2.0, 1.0}}).sample(grid);
  const auto w = GammaSeries({{1.0, 1.0, 2.0}}).sample(grid);

  const auto r0 = cartan_reduce(HalfLineFunction(grid), g2, 1.0, 1.0, 1.0, 0.0);
  CHECK(relative_distance(r0.second_rhs, g2) == 0.0);
  CHECK(relative_distance(r0.first_rhs, g2) == 0.0);

  const auto r1 = cartan_reduce(lin_comb(2.0, w, 0.0, w), g2, 2.0, 1.0, 1.0, 0.0);
  CHECK(relative_distance(r1.second_rhs, lin_comb(1.0, g2, -1.0, w)) <= 1e-15);

  expect_error(Errc::ZeroEigenvalue, [&] { (void)cartan_reduce(w, g2, 0.0, 1.0, 1.0, 0.0); });
}

TEST_CASE("cartan round trip and recombination") {
  const auto grid = default_grid();
  for (const auto& ds : kDatasets) {
    const auto d = build(ds, grid);
    for (double lambda : {-2.0, 0.5, 1.0, 3.0}) {
      for (double phi : {-1.0, 0.25, 2.0}) {
        const auto red = cartan_reduce(d.g1, d.g2, lambda, phi, d.m, d.m1);
        const auto [g1, g2] = cartan_recombine(red);
        CHECK(relative_distance(g1, d.g1) <= 1e-13);
        CHECK(relative_distance(g2, d.g2) == 0.0);
        const auto sol = common_solution(d);
        CHECK(cartan_second_residual(red, sol.report.solution, {0.0, ds.v}) <= 1e-6);
      }
    }
  }
  const auto red = cartan_reduce(HalfLineFunction(grid), HalfLineFunction(grid), 1.0, 0.0, 1.0, 0.0);
  expect_error(Errc::InvalidParams, [&] { (void)cartan_recombine(red); });
}
