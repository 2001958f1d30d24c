#pragma once

#include "twistcoh/coboundary.hpp"

namespace twistcoh {

/// One irreducible component β ⊗ ζ_v of (R⋉R) × R: the R-factor acts by i v.
struct CocycleData {
  HalfLineFunction g1;
  HalfLineFunction g2;
  double v = 1.0;
  double m = 1.0;
  double m1 = 0.0;
  ModelRepParams p;
};

/// ‖(X + m) g1 - (i v + m1) g2‖ / max(‖g1‖, ‖g2‖); zero data gives 0.
double verify_cocycle(const CocycleData& d);

struct CocycleSolution {
  explicit CocycleSolution(SolveReport r) : report(std::move(r)) {}

  SolveReport report;            ///< solve of (X + m) h = g2
  double residual_flow = 0.0;    ///< ‖(X + m) h - g2‖ / ‖g2‖
  double residual_factor = 0.0;  ///< ‖(i v + m1) h - g1‖ / ‖g1‖
  double compatibility_defect = 0.0;
  /// false when g1 lacks weighted regularity m / lambda1, so D(g2) is not forced to vanish.
  bool obstruction_gate_active = false;
};

inline constexpr double kCocycleCompatibilityTol = 1e-7;

/// Common solution h of (i v + m1) h = g1 and (X + m) h = g2.
/// Throws IncompatibleCocycle when the compatibility defect exceeds 1e-7 or v == 0,
/// ObstructionNonzero when g1 is regular enough but D(g2) does not vanish.
CocycleSolution common_solution(const CocycleData& d, const SolveOptions& opts = {});

/// Data rewritten for a Cartan-type element u with [u, v] = lambda v and phi(X) = phiX.
struct CartanReduction {
  double lambda = 1.0;
  double phiX = 0.0;
  double m = 1.0;
  double m1 = 0.0;
  HalfLineFunction first_rhs;   ///< right-hand side of (X + m) h = g2
  HalfLineFunction second_rhs;  ///< g2 - phiX / lambda * g1
};

/// Throws ZeroEigenvalue when lambda == 0.
CartanReduction cartan_reduce(const HalfLineFunction& g1, const HalfLineFunction& g2,
                              double lambda, double phiX, double m, double m1);

/// Inverse of cartan_reduce: returns (g1, g2). Needs phiX != 0.
std::pair<HalfLineFunction, HalfLineFunction> cartan_recombine(const CartanReduction& red);

/// Relative residual of the second reduced equation
/// (X + m - phiX/lambda (u + m1)) h = second_rhs, with u acting as the scalar u_action.
double cartan_second_residual(const CartanReduction& red, const HalfLineFunction& h,
                              cplx u_action);

}  // namespace twistcoh
