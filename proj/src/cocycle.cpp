#include "twistcoh/cocycle.hpp"

#include <algorithm>

namespace twistcoh {

double verify_cocycle(const CocycleData& d) {
  require_same_grid(d.g1, d.g2);
  const auto lhs = lin_comb(1.0, apply_X(d.g1), d.m, d.g1);
  const auto diff = lin_comb(1.0, lhs, -cplx(d.m1, d.v), d.g2);
  const double scale = std::max(norm(d.g1), norm(d.g2));
  if (scale == 0.0) return 0.0;
  return norm(diff) / scale;
}

CocycleSolution common_solution(const CocycleData& d, const SolveOptions& opts) {
  if (d.v == 0.0) {
    throw Error(Errc::IncompatibleCocycle, "component with v = 0 has R-invariant vectors");
  }
  CocycleSolution out{SolveReport(HalfLineFunction(d.g2.grid()))};
  out.compatibility_defect = verify_cocycle(d);
  if (out.compatibility_defect > kCocycleCompatibilityTol) {
    throw Error(Errc::IncompatibleCocycle,
                "compatibility defect " + std::to_string(out.compatibility_defect));
  }

  auto p = d.p;
  p.m = d.m;
  const double zero_line[] = {0.0};
  out.report = solve_mellin(d.g2, p, 0.0, zero_line, {}, opts);

  // D(g2) = 0 is forced only when g1 r^{-m} is in E (regularity m / lambda1).
  out.obstruction_gate_active = decay_admissible(d.g1, d.m, opts.decay_tol) && norm(d.g1) > 0.0;
  if (out.obstruction_gate_active && out.report.obstruction_defined &&
      !out.report.obstruction_vanishes()) {
    throw Error(Errc::ObstructionNonzero,
                "D(g2) does not vanish for regular compatible data; discretization failure");
  }
  if (!out.obstruction_gate_active) out.report.flags.push_back("obstruction-gate-inactive");

  const auto& h = out.report.solution;
  out.residual_flow = out.report.residual;
  out.residual_factor = relative_distance(lin_comb(cplx(d.m1, d.v), h, 0.0, h), d.g1);
  return out;
}

CartanReduction cartan_reduce(const HalfLineFunction& g1, const HalfLineFunction& g2,
                              double lambda, double phiX, double m, double m1) {
  if (lambda == 0.0) throw Error(Errc::ZeroEigenvalue, "Cartan reduction needs lambda != 0");
  return CartanReduction{lambda, phiX, m, m1, g2, lin_comb(1.0, g2, -phiX / lambda, g1)};
}

std::pair<HalfLineFunction, HalfLineFunction> cartan_recombine(const CartanReduction& red) {
  if (red.phiX == 0.0) {
    throw Error(Errc::InvalidParams, "phi(X) = 0 loses g1; recombination undefined");
  }
  const double scale = red.lambda / red.phiX;
  auto g1 = lin_comb(scale, red.first_rhs, -scale, red.second_rhs);
  return {std::move(g1), red.first_rhs};
}

double cartan_second_residual(const CartanReduction& red, const HalfLineFunction& h,
                              cplx u_action) {
  const cplx shift = red.m - red.phiX / red.lambda * (u_action + red.m1);
  const auto lhs = lin_comb(1.0, apply_X(h), shift, h);
  return relative_distance(lhs, red.second_rhs);
}

}  // namespace twistcoh
