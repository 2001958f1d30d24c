#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twistcoh/halfline.hpp"
#include "twistcoh/model_reps.hpp"

namespace twistcoh {

struct SolveOptions {
  double decay_tol = kDefaultDecayTol;
  /// |D(g)| <= obstruction_rel_tol * max|g| counts as a vanishing obstruction.
  double obstruction_rel_tol = 1e-9;
  /// Lines with |a + m| < eps_pole need a vanishing obstruction.
  double eps_pole = 0.05;
  /// Margin beyond -m at which g must still be admissible for D(g) to be defined.
  double obstruction_margin = 0.05;
};

struct WeightedNormRow {
  double t = 0.0;
  double value = 0.0;       ///< ‖(I - u1^2)^{t/2} f‖
  bool admissible = false;  ///< weighted samples decay at both ends
  std::string bound_class;
};

struct LineProfile {
  double a = 0.0;
  double norm_sq = 0.0;  ///< ∫ |P(a + i t)|^2 dt
};

struct SolveReport {
  explicit SolveReport(HalfLineFunction f) : solution(std::move(f)) {}

  HalfLineFunction solution;
  cplx obstruction{};
  bool obstruction_defined = false;
  double obstruction_tol = 0.0;
  double residual = 0.0;         ///< ‖(X + m) f - g‖ / ‖g‖
  double base_norm_ratio = 0.0;  ///< m ‖f‖ / ‖g‖
  std::vector<WeightedNormRow> weighted_norms;
  double coincidence_defect = 0.0;
  std::vector<LineProfile> line_profiles;
  std::vector<std::string> flags;

  bool obstruction_vanishes() const {
    return obstruction_defined && std::abs(obstruction) <= obstruction_tol;
  }
};

double obstruction_tolerance(const HalfLineFunction& g, const SolveOptions& opts = {});

/// D(g) = M(g, -m) by direct quadrature of g r^{-m-1} dr. Throws NotAdmissible
/// unless g is strip-admissible on [-m - margin, 0].
cplx obstruction(const HalfLineFunction& g, const ModelRepParams& p,
                 const SolveOptions& opts = {});

/// g - (D(g) / D(bump)) bump. Throws DegenerateBump when D(bump) is negligible.
HalfLineFunction project_obstruction(const HalfLineFunction& g, const ModelRepParams& p,
                                     const HalfLineFunction& bump,
                                     const SolveOptions& opts = {});

/// f(r) = r^m ∫_r^∞ g(ρ) ρ^{-m-1} dρ, the bounded inverse of X + m, marched from the
/// large-r end with a sixth-order exponential quadrature on the log grid.
HalfLineFunction solve_semigroup(const HalfLineFunction& g, double m);

/// ‖(X + m) f - g‖ / ‖g‖ with X applied spectrally; 0/0 reads as 0.
double coboundary_residual(const HalfLineFunction& f, const HalfLineFunction& g, double m);

/// Solves (X + m) f = g by inverting P(z) = M(g, z) / (m + z) on Re z = 0 and
/// cross-checks against the inversions along every other requested line.
/// Weighted norms ‖(I - u1^2)^{t/2} f‖ are reported for each t in weight_orders.
SolveReport solve_mellin(const HalfLineFunction& g, const ModelRepParams& p, double s,
                         std::span<const double> lines,
                         std::span<const double> weight_orders = {},
                         const SolveOptions& opts = {});

/// Solves (d/dx + s) f = g on a uniform periodic grid by dividing the DFT by s + i ω.
/// Throws ZeroTwist when s == 0.
std::vector<cplx> solve_spectral_line(std::span<const cplx> g, double dx, double s);

/// Bound class of the weighted estimate at order t for regularity s.
std::string bound_class(const ModelRepParams& p, double s, double t);

/// ε used to split the two regimes when lambda1 > 0 and s > m / lambda1:
/// half of min{m/2, 1/2, (s lambda1 - m)/2}.
double regime_epsilon(const ModelRepParams& p, double s);

struct EstimateRow {
  double t = 0.0;
  double lhs = 0.0;       ///< ‖(I - u1^2)^{t/2} f‖
  double rhs_norm = 0.0;  ///< ‖g‖_t surrogate on the bound's right-hand side
  double ratio = 0.0;     ///< lhs * factor / rhs_norm
  std::string bound_class;
  bool near_resonance = false;  ///< |t lambda1 - m| < ε/2 in the high-regularity regime
  bool admissible = false;
};

struct EstimateTable {
  std::vector<EstimateRow> rows;
  double empirical_constant = 0.0;       ///< max ratio over admissible, non-resonant rows
  double empirical_constant_near = 0.0;  ///< max ratio over admissible resonant rows
  double base_norm_ratio = 0.0;
  std::vector<std::string> flags;
};

/// ‖g‖_t surrogate: ‖(I - u1^2)^{t/2} g‖ + ‖g‖.
double fractional_sobolev_surrogate(const HalfLineFunction& g, double t, const ModelRepParams& p);

/// Weighted estimates of the Mellin solution over t_grid. Throws NotAdmissible if g
/// does not decay at the grid ends.
EstimateTable estimate_sweep(const HalfLineFunction& g, const ModelRepParams& p, double s,
                             std::span<const double> t_grid, const SolveOptions& opts = {});

}  // namespace twistcoh
