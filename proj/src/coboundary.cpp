#include "twistcoh/coboundary.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numbers>

#include "twistcoh/fft.hpp"
#include "twistcoh/mellin.hpp"

namespace twistcoh {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n) {
  GaussLegendre q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[i] = x;
    q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

constexpr int kStencil = 6;  // interpolation nodes per step (degree 5)

// Weights w_i such that ∫_0^h e^{-m(h-τ)} G(τ) dτ ≈ Σ_i w_i G((offset + i) h) when G
// is replaced by its degree-5 interpolant on the stencil.
std::array<double, kStencil> exponential_weights(double m, double h, int offset) {
  static const GaussLegendre gl = gauss_legendre(24);
  std::array<double, kStencil> w{};
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double tau = 0.5 * h * (gl.nodes[q] + 1.0);
    const double kernel = 0.5 * h * gl.weights[q] * std::exp(-m * (h - tau));
    for (int i = 0; i < kStencil; ++i) {
      double basis = 1.0;
      for (int j = 0; j < kStencil; ++j) {
        if (j == i) continue;
        basis *= (tau / h - (offset + j)) / static_cast<double>(i - j);
      }
      w[i] += kernel * basis;
    }
  }
  return w;
}

// P(a + i t) = M(g, a + i t) / (m + a + i t); exact zeros of the denominator are
// filled from the neighbours (only reached when the obstruction vanishes).
MellinLine quotient_line(const HalfLineFunction& g, double a, double m, double decay_tol) {
  auto line = mellin_line(g, a, decay_tol);
  std::vector<std::size_t> holes;
  for (std::size_t k = 0; k < line.values.size(); ++k) {
    const cplx denom(m + a, line.t[k]);
    if (std::abs(denom) == 0.0) {
      holes.push_back(k);
      continue;
    }
    line.values[k] /= denom;
  }
  for (auto k : holes) {
    const auto n = line.values.size();
    line.values[k] = 0.5 * (line.values[(k + n - 1) % n] + line.values[(k + 1) % n]);
  }
  return line;
}

// log(1 + e^y) without overflow
double softplus(double y) { return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y))); }

// (I - u1^2)^{t/2} f for the solution of (X + m) f = g, given its line-0 inverse f0.
// For lambda1 > 0 the weight grows like r^{-t lambda1} toward small r, where f0 only
// carries an absolute roundoff floor. The inverse DFT of P on Re z = a = -t lambda1 is
// f r^{a} itself, with a flat floor, and the remaining factor (1 + r^{2 lambda1})^{t/2}
// is bounded there; so r < 1 reads from that line and r >= 1 from f0. Lines past the
// pole are used only when D(g) vanishes.
HalfLineFunction weighted_solution(const HalfLineFunction& g, const HalfLineFunction& f0,
                                   const ModelRepParams& p, double t, bool obstruction_free,
                                   const SolveOptions& opts) {
  if (p.lambda1 <= 0.0 || t == 0.0) return fractional_weight(f0, t, p);
  const double m = p.m;
  double a = -t * p.lambda1;
  if (std::abs(a + m) < opts.eps_pole) a = a >= -m ? -m + opts.eps_pole : -m - opts.eps_pole;
  if ((a < -m && !obstruction_free) || !strip_admissible(g, Strip{a, a}, opts.decay_tol).ok) {
    return fractional_weight(f0, t, p);
  }
  auto line = quotient_line(g, a, m, opts.decay_tol);
  line.a = 0.0;  // skip the r^{-a} reweighting: the inverse is then f r^{a}
  const auto fa = mellin_inverse_line(line, g.grid());
  auto out = fractional_weight(f0, t, p);
  for (std::size_t j = 0; j < fa.size(); ++j) {
    const double x = g.grid().x(j);
    if (x > 0.0) out[j] = fa[j] * std::exp(0.5 * t * softplus(2.0 * p.lambda1 * x) + a * x);
  }
  return out;
}

}  // namespace

double obstruction_tolerance(const HalfLineFunction& g, const SolveOptions& opts) {
  return opts.obstruction_rel_tol * g.max_abs();
}

cplx obstruction(const HalfLineFunction& g, const ModelRepParams& p, const SolveOptions& opts) {
  const auto check =
      strip_admissible(g, Strip{-p.m - opts.obstruction_margin, 0.0}, opts.decay_tol);
  if (!check.ok) {
    throw Error(Errc::NotAdmissible,
                "g lacks the regularity needed for D_m(g): " + check.diagnostic);
  }
  std::vector<cplx> integrand(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    // g r^{-m-1} dr = g e^{m x} dx
    integrand[j] = g[j] == cplx{} ? cplx{} : g[j] * std::exp(p.m * g.grid().x(j));
  }
  return kInvSqrt2Pi * integrate_dx(g.grid(), integrand);
}

HalfLineFunction project_obstruction(const HalfLineFunction& g, const ModelRepParams& p,
                                     const HalfLineFunction& bump, const SolveOptions& opts) {
  require_same_grid(g, bump);
  const cplx d_bump = obstruction(bump, p, opts);
  if (std::abs(d_bump) <= 1e-12 * norm(bump) || d_bump == cplx{}) {
    throw Error(Errc::DegenerateBump, "bump has no obstruction mass to project with");
  }
  const cplx d_g = obstruction(g, p, opts);
  return lin_comb(1.0, g, -d_g / d_bump, bump);
}

HalfLineFunction solve_semigroup(const HalfLineFunction& g, double m) {
  if (!(m > 0.0)) throw Error(Errc::InvalidParams, "semigroup solve needs m > 0");
  const auto n = g.size();
  const double h = g.grid().spacing();
  const double decay = std::exp(-m * h);

  constexpr int kCentered = -(kStencil / 2 - 1);  // stencil j-2 .. j+3 around [x_j, x_{j+1}]
  std::array<std::array<double, kStencil>, kStencil> weights{};
  for (int s = 0; s < kStencil; ++s) weights[s] = exponential_weights(m, h, -s);

  // F(x) = ∫_{-∞}^x e^{-m(x-y)} G(y) dy, with F(x_min) = 0
  HalfLineFunction f(g.grid());
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const long lo = std::clamp<long>(static_cast<long>(j) + kCentered, 0,
                                     static_cast<long>(n) - kStencil);
    const int offset = static_cast<int>(lo - static_cast<long>(j));
    const auto& w = weights[-offset];
    cplx step{};
    for (int i = 0; i < kStencil; ++i) step += w[i] * g[static_cast<std::size_t>(lo + i)];
    f[j + 1] = decay * f[j] + step;
  }
  return f;
}

double coboundary_residual(const HalfLineFunction& f, const HalfLineFunction& g, double m) {
  const auto lhs = lin_comb(1.0, apply_X(f), m, f);
  return relative_distance(lhs, g);
}

std::string bound_class(const ModelRepParams& p, double s, double t) {
  if (p.lambda1 < 0.0) return "C(m-t*lambda1)^-1*|g|_t";
  if (s <= p.m / p.lambda1) {
    return t < s ? "C(m-t*lambda1)^-1*|g|_t" : "none(t>=s)";
  }
  const double eps = regime_epsilon(p, s);
  if (std::abs(t * p.lambda1 - p.m) >= 0.5 * eps) return "C_eps*|g|_t";
  return "C_eps*|g|_{(m+eps)/lambda1}";
}

double regime_epsilon(const ModelRepParams& p, double s) {
  return 0.5 * std::min({0.5 * p.m, 0.5, 0.5 * (s * p.lambda1 - p.m)});
}

SolveReport solve_mellin(const HalfLineFunction& g, const ModelRepParams& p, double s,
                         std::span<const double> lines, std::span<const double> weight_orders,
                         const SolveOptions& opts) {
  p.validate();
  const double m = p.m;
  SolveReport report(HalfLineFunction(g.grid()));
  report.obstruction_tol = obstruction_tolerance(g, opts);
  try {
    report.obstruction = obstruction(g, p, opts);
    report.obstruction_defined = true;
  } catch (const Error& e) {
    if (e.code() != Errc::NotAdmissible) throw;
    report.flags.push_back("obstruction-undefined");
  }

  std::vector<double> all_lines{0.0};
  for (double a : lines) {
    if (a != 0.0) all_lines.push_back(a);
  }
  for (double a : all_lines) {
    if (!strip_admissible(g, Strip{a, a}, opts.decay_tol).ok) {
      throw Error(Errc::NotAdmissible, fmt("g r^{%g} is not decay-admissible", a));
    }
    if (std::abs(a + m) < opts.eps_pole && !report.obstruction_vanishes()) {
      throw Error(Errc::PoleOnLine,
                  fmt("line Re z = %g passes within eps_pole of the pole at -m", a));
    }
  }

  for (double a : all_lines) {
    const auto line = quotient_line(g, a, m, opts.decay_tol);
    report.line_profiles.push_back({a, line.norm_sq()});
    auto f_a = mellin_inverse_line(line, g.grid());
    if (a == 0.0) {
      report.solution = std::move(f_a);
      continue;
    }
    if (a < -m && report.obstruction_defined && !report.obstruction_vanishes()) {
      report.flags.push_back(fmt("line %g lies past the pole with nonzero obstruction", a));
    }
    report.coincidence_defect =
        std::max(report.coincidence_defect, relative_distance(f_a, report.solution));
  }

  const auto& f = report.solution;
  const double g_norm = norm(g);
  report.residual = coboundary_residual(f, g, m);
  report.base_norm_ratio = g_norm == 0.0 ? 0.0 : m * norm(f) / g_norm;

  for (double t : weight_orders) {
    const auto weighted = weighted_solution(g, f, p, t, report.obstruction_vanishes(), opts);
    WeightedNormRow row;
    row.t = t;
    row.value = norm(weighted);
    row.admissible = decay_admissible(weighted, 0.0, opts.decay_tol);
    row.bound_class = bound_class(p, s, t);
    if (!row.admissible) report.flags.push_back(fmt("weighted norm at t=%g not admissible", t));
    report.weighted_norms.push_back(std::move(row));
  }
  return report;
}

std::vector<cplx> solve_spectral_line(std::span<const cplx> g, double dx, double s) {
  if (s == 0.0) throw Error(Errc::ZeroTwist, "(u + s) f = g needs s != 0");
  const auto n = g.size();
  auto spectrum = fft::forward(g);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = fft::bin_frequency(k, n, dx);
    if (n % 2 == 0 && k == n / 2) {
      // average of ±ω keeps the Nyquist mode real and |multiplier| <= 1/|s|
      spectrum[k] *= s / (s * s + w * w);
    } else {
      spectrum[k] /= cplx(s, w);
    }
  }
  auto f = fft::backward(spectrum);
  for (auto& v : f) v /= static_cast<double>(n);
  return f;
}

double fractional_sobolev_surrogate(const HalfLineFunction& g, double t,
                                    const ModelRepParams& p) {
  return norm(fractional_weight(g, t, p)) + norm(g);
}

EstimateTable estimate_sweep(const HalfLineFunction& g, const ModelRepParams& p, double s,
                             std::span<const double> t_grid, const SolveOptions& opts) {
  p.validate();
  if (!decay_admissible(g, 0.0, opts.decay_tol)) {
    throw Error(Errc::NotAdmissible, "g does not decay at the grid ends");
  }
  const double zero_line[] = {0.0};
  const auto solve = solve_mellin(g, p, s, zero_line, {}, opts);
  const auto& f = solve.solution;

  EstimateTable table;
  table.base_norm_ratio = solve.base_norm_ratio;
  table.flags = solve.flags;
  const bool high_regularity = p.lambda1 > 0.0 && s > p.m / p.lambda1;
  if (high_regularity && !solve.obstruction_vanishes()) {
    table.flags.push_back("obstruction-nonzero");
  }
  const double eps = high_regularity ? regime_epsilon(p, s) : 0.0;

  for (double t : t_grid) {
    EstimateRow row;
    row.t = t;
    const auto wf = weighted_solution(g, f, p, t, solve.obstruction_vanishes(), opts);
    row.lhs = norm(wf);
    row.bound_class = bound_class(p, s, t);
    row.admissible = decay_admissible(wf, 0.0, opts.decay_tol) &&
                     decay_admissible(fractional_weight(g, t, p), 0.0, opts.decay_tol);
    if (high_regularity) {
      row.near_resonance = std::abs(t * p.lambda1 - p.m) < 0.5 * eps;
      const double order = row.near_resonance ? (p.m + eps) / p.lambda1 : t;
      row.rhs_norm = fractional_sobolev_surrogate(g, order, p);
      row.ratio = row.rhs_norm == 0.0 ? 0.0 : row.lhs / row.rhs_norm;
    } else {
      row.rhs_norm = fractional_sobolev_surrogate(g, t, p);
      const double factor = p.m - t * p.lambda1;
      row.ratio = row.rhs_norm == 0.0 ? 0.0 : row.lhs * factor / row.rhs_norm;
      if (p.lambda1 > 0.0 && t >= s) row.admissible = false;
    }
    if (row.admissible) {
      auto& slot = row.near_resonance ? table.empirical_constant_near : table.empirical_constant;
      slot = std::max(slot, row.ratio);
    } else {
      table.flags.push_back(fmt("row t=%g not admissible", t));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace twistcoh
