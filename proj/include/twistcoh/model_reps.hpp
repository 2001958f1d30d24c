#pragma once

#include <optional>
#include <span>
#include <vector>

#include "twistcoh/halfline.hpp"

namespace twistcoh {

/// Parameters of a model irreducible representation of R⋉R (lambda2, s0 absent)
/// or R⋉R^2, together with the twist m of the equation (X + m) f = g.
struct ModelRepParams {
  int sigma = 1;  ///< +1 or -1; sign in front of i r^{-lambda1}
  double lambda1 = 1.0;
  std::optional<double> lambda2;
  std::optional<double> s0;
  double m = 1.0;

  /// Throws InvalidParams on sigma not in {±1}, lambda1 == 0, m <= 0, s0 == 0,
  /// or s0 without lambda2.
  void validate() const;
  bool has_u2() const { return lambda2.has_value() && s0.has_value(); }
};

enum class Generator { X, U1, U2 };

/// X = -r d/dr, i.e. +d/dx on the log grid. Spectral, except at samples below 1e-6 of
/// the peak, which use fourth-order differences.
HalfLineFunction apply_X(const HalfLineFunction& f);

/// u1 f = sigma i r^{-lambda1} f
HalfLineFunction apply_u1(const HalfLineFunction& f, const ModelRepParams& p);

/// u2 f = s0 i r^{-lambda2} f; throws MissingParams without s0/lambda2.
HalfLineFunction apply_u2(const HalfLineFunction& f, const ModelRepParams& p);

HalfLineFunction apply_generator(Generator g, const HalfLineFunction& f, const ModelRepParams& p);

struct FlowResult {
  HalfLineFunction function;
  long shift_bins = 0;     ///< f_new[j] = f[j + shift_bins]
  double rounding = 0.0;   ///< log s - shift_bins * h
  std::size_t vacated = 0; ///< zero-filled bins
};

/// (exp(log s X) f)(r) = f(r / s): a shift by log s in x, rounded to the nearest bin.
FlowResult flow_action(const HalfLineFunction& f, double s);

/// Multiplication by (1 + r^{-2 lambda1})^{t/2}, the action of (I - u1^2)^{t/2}.
HalfLineFunction fractional_weight(const HalfLineFunction& f, double t, const ModelRepParams& p);

/// Same multiplier with an explicit exponent lambda (used for u2 with lambda2).
HalfLineFunction fractional_weight(const HalfLineFunction& f, double t, double lambda);

inline constexpr int kDefaultMaxSobolevOrder = 6;

/// sqrt(‖f‖^2 + sum over all words Y_1...Y_l, 1 <= l <= k, of ‖Y_1...Y_l f‖^2).
/// Throws MissingParams if U2 is requested without u2 parameters and
/// InvalidParams when k exceeds max_order.
double sobolev_norm(const HalfLineFunction& f, int k, const ModelRepParams& p,
                    std::span<const Generator> generators,
                    int max_order = kDefaultMaxSobolevOrder);

}  // namespace twistcoh
