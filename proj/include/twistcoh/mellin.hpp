#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistcoh/halfline.hpp"

namespace twistcoh {

/// Samples of M(f, a + i t) on the DFT frequencies of the source grid.
///
/// Convention: M(f, c) = (2 pi)^{-1/2} * integral_0^inf f(r) r^{c-1} dr, so
/// M(f, a + i t) is the unitary Fourier transform of x -> f(e^{-x}) e^{-a x}.
/// t is stored in ascending order; t_k = 2 pi k / (n h) for k in [-n/2, n/2).
struct MellinLine {
  double a = 0.0;
  std::vector<double> t;
  std::vector<cplx> values;
  /// Decay-admissibility of the integrand actually transformed, f r^{a}.
  bool admissible = false;

  /// Spacing of the t samples.
  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  /// integral |M(f, a + i t)|^2 dt on the samples.
  double norm_sq() const;
  /// sup_k |M(f, a + i t_k)|
  double sup_abs() const;
};

/// Closed vertical strip lo <= Re z <= hi.
struct Strip {
  double lo = 0.0;
  double hi = 0.0;
};

struct StripCheck {
  bool ok = true;
  std::vector<double> failing_edges;
  std::string diagnostic;
};

MellinLine mellin_line(const HalfLineFunction& f, double a, double decay_tol = kDefaultDecayTol);

/// h(r_j) = r_j^{-a} * (inverse DFT of line.values)(x_j). For a > 0 roundoff grows like
/// e^{a x_max} toward the small-r end.
HalfLineFunction mellin_inverse_line(const MellinLine& line, const LogGrid& grid);

/// |‖f‖^2 - ∫|M(f, i t)|^2 dt| / max(‖f‖^2, eps)
double parseval_defect(const HalfLineFunction& f);

/// d/dx of f(e^{-x}) by spectral differentiation of f r^{frame}, reweighted back.
/// frame = 0 differentiates the raw samples.
HalfLineFunction spectral_dx(const HalfLineFunction& f, double frame = 0.0);

/// r d/dr f = -d/dx, spectrally.
HalfLineFunction log_derivative(const HalfLineFunction& f, double frame = 0.0);

/// r d/dr f by fourth-order central differences in x (one-sided near the ends).
HalfLineFunction log_derivative_fd(const HalfLineFunction& f);

/// Frame in which derivative_rule_defect differentiates before sampling line a:
/// a moved 0.25 towards zero (zero when |a| <= 0.25).
double derivative_frame(double a);

/// sup_k |M(r∂_r f, a+it_k) + (a+it_k) M(f, a+it_k)| / sup_k |M(f, a+it_k)|.
/// Throws NotAdmissible unless f r^{a} and f r^{frame} decay at both ends.
double derivative_rule_defect(const HalfLineFunction& f, double a,
                              double decay_tol = kDefaultDecayTol);

/// Numerical check that the strip lies in the domain of M(f, .): at each edge c,
/// f r^{c} is decay-admissible with finite norm.
StripCheck strip_admissible(const HalfLineFunction& f, Strip strip,
                            double decay_tol = kDefaultDecayTol);

}  // namespace twistcoh
