#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twistcoh/halfline.hpp"

namespace twistcoh {

/// coef * r^k * e^{-c r}
struct GammaTerm {
  cplx coef;
  double k;
  double c;
};

/// Finite sums of r^k e^{-c r} terms. Every integral these functions meet in
/// the model representations reduces to Gamma functions, so each one carries
/// its own analytic reference values.
class GammaSeries {
 public:
  GammaSeries() = default;
  explicit GammaSeries(std::vector<GammaTerm> terms);

  const std::vector<GammaTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  cplx operator()(double r) const;
  HalfLineFunction sample(const LogGrid& grid) const;

  friend GammaSeries operator+(const GammaSeries& a, const GammaSeries& b);
  friend GammaSeries operator-(const GammaSeries& a, const GammaSeries& b);
  friend GammaSeries operator*(cplx s, const GammaSeries& a);

  /// -r d/dr, symbolically.
  GammaSeries apply_X() const;
  /// r^p times the series.
  GammaSeries times_power(double p) const;

  /// ‖g r^{-a}‖_E; nullopt if any cross term diverges.
  std::optional<double> weighted_norm(double a) const;
  /// M(g, c) for real c; nullopt unless k + c > 0 for every term.
  std::optional<cplx> mellin(double c) const;
  /// D_m(g) = M(g, -m)
  std::optional<cplx> obstruction(double m) const { return mellin(-m); }
  /// r^m ∫_r^∞ g(ρ) ρ^{-m-1} dρ in closed form, available when every k - m is a
  /// positive integer (the upper incomplete Gamma then terminates).
  std::optional<GammaSeries> semigroup_solution(double m) const;

  std::string to_string() const;

 private:
  std::vector<GammaTerm> terms_;
};

struct NamedSeries {
  std::string name;
  GammaSeries series;
};

/// The eight-member reference family: r^k e^{-c r} for k in {1,2,3}, c in {1,2},
/// plus the two combinations r^2 e^{-r} - 2 r^2 e^{-2r} and r^3 e^{-r} - 4 r^3 e^{-2r}
/// whose obstruction at m = 1 vanishes. Names are "k<k>c<c>", "k2c1-2k2c2" and "k3c1-4k3c2".
std::vector<NamedSeries> closed_form_family();

/// Parses "(coef, k, c); (coef, k, c) ..." with real coefficients. Throws ConfigError.
GammaSeries parse_gamma_series(std::string_view text);

}  // namespace twistcoh
