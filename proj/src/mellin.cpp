#include "twistcoh/mellin.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numbers>

#include "twistcoh/fft.hpp"

namespace twistcoh {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

std::size_t ascending_index(std::size_t fft_index, std::size_t n) {
  return (fft_index + n / 2) % n;
}

std::string format_edge(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", c);
  return buf;
}

}  // namespace

double MellinLine::norm_sq() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * dt();
}

double MellinLine::sup_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

MellinLine mellin_line(const HalfLineFunction& f, double a, double decay_tol) {
  const auto& grid = f.grid();
  const auto n = grid.size();
  const double h = grid.spacing();
  const auto weighted = reweight(f, -a);  // f r^{a}
  const auto spectrum = fft::forward(weighted.values());

  MellinLine line;
  line.a = a;
  line.t.resize(n);
  line.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = fft::bin_frequency(k, n, h);
    const auto i = ascending_index(k, n);
    line.t[i] = t;
    line.values[i] = h * kInvSqrt2Pi * std::polar(1.0, -t * grid.x_min()) * spectrum[k];
  }
  line.admissible = decay_admissible(f, -a, decay_tol);
  return line;
}

HalfLineFunction mellin_inverse_line(const MellinLine& line, const LogGrid& grid) {
  const auto n = grid.size();
  if (line.values.size() != n) {
    throw Error(Errc::GridMismatch, "Mellin line was sampled on a different grid");
  }
  const double h = grid.spacing();
  std::vector<cplx> spectrum(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = fft::bin_frequency(k, n, h);
    spectrum[k] = line.values[ascending_index(k, n)] * std::polar(1.0, t * grid.x_min());
  }
  auto samples = fft::backward(spectrum);
  const double scale = std::sqrt(2.0 * std::numbers::pi) / (static_cast<double>(n) * h);
  for (auto& v : samples) v *= scale;
  // samples hold f r^{a}; undo the weight
  return reweight(HalfLineFunction(grid, std::move(samples)), line.a);
}

double parseval_defect(const HalfLineFunction& f) {
  const double lhs = std::pow(norm(f), 2);
  const double rhs = mellin_line(f, 0.0).norm_sq();
  return std::abs(lhs - rhs) / std::max(lhs, std::numeric_limits<double>::epsilon());
}

HalfLineFunction spectral_dx(const HalfLineFunction& f, double frame) {
  const auto& grid = f.grid();
  const auto n = grid.size();
  const auto framed = reweight(f, -frame);  // f r^{frame} = F e^{-frame x}
  auto spectrum = fft::forward(framed.values());
  for (std::size_t k = 0; k < n; ++k) {
    // the Nyquist bin of an even-length grid has no well-defined derivative
    const bool nyquist = (n % 2 == 0) && k == n / 2;
    const double t = nyquist ? 0.0 : fft::bin_frequency(k, n, grid.spacing());
    spectrum[k] *= cplx(0.0, t);
  }
  auto deriv = fft::backward(spectrum);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) deriv[j] = deriv[j] * inv_n + frame * framed[j];
  return reweight(HalfLineFunction(grid, std::move(deriv)), frame);
}

HalfLineFunction log_derivative(const HalfLineFunction& f, double frame) {
  auto d = spectral_dx(f, frame);
  for (auto& v : d.values()) v = -v;
  return d;
}

HalfLineFunction log_derivative_fd(const HalfLineFunction& f) {
  const auto n = f.size();
  const double h = f.grid().spacing();
  HalfLineFunction out(f.grid());
  for (std::size_t j = 0; j < n; ++j) {
    cplx dx;
    if (j >= 2 && j + 2 < n) {
      dx = (-f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]) / (12.0 * h);
    } else if (j >= 1 && j + 1 < n) {
      dx = (f[j + 1] - f[j - 1]) / (2.0 * h);
    } else if (j == 0) {
      dx = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    } else {
      dx = (3.0 * f[j] - 4.0 * f[j - 1] + f[j - 2]) / (2.0 * h);
    }
    out[j] = -dx;
  }
  return out;
}

double derivative_frame(double a) {
  const double shift = std::min(std::abs(a), 0.25);
  return a > 0 ? a - shift : a + shift;
}

double derivative_rule_defect(const HalfLineFunction& f, double a, double decay_tol) {
  const double frame = derivative_frame(a);
  if (!decay_admissible(f, -a, decay_tol) || !decay_admissible(f, -frame, decay_tol)) {
    throw Error(Errc::NotAdmissible,
                "f r^{" + format_edge(a) + "} is not decay-admissible on this grid");
  }
  const auto rdr = log_derivative(f, frame);
  const auto mf = mellin_line(f, a, decay_tol);
  const auto mdf = mellin_line(rdr, a, decay_tol);
  const double scale = mf.sup_abs();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < mf.values.size(); ++k) {
    const cplx c(a, mf.t[k]);
    worst = std::max(worst, std::abs(mdf.values[k] + c * mf.values[k]));
  }
  return worst / scale;
}

StripCheck strip_admissible(const HalfLineFunction& f, Strip strip, double decay_tol) {
  StripCheck check;
  std::vector<double> edges{strip.lo};
  if (strip.hi != strip.lo) edges.push_back(strip.hi);
  for (double c : edges) {
    const bool decays = decay_admissible(f, -c, decay_tol);
    const bool finite = std::isfinite(weighted_norm(f, -c));
    if (decays && finite) continue;
    check.ok = false;
    check.failing_edges.push_back(c);
    if (!check.diagnostic.empty()) check.diagnostic += "; ";
    check.diagnostic += "edge Re z = " + format_edge(c) + ": f r^{" + format_edge(c) + "} ";
    if (!finite) {
      check.diagnostic += "has infinite norm";
    } else {
      const auto n = f.size();
      const double peak = [&] {
        double p = 0.0;
        for (std::size_t j = 0; j < n; ++j) p = std::max(p, weighted_abs(f, j, -c));
        return p;
      }();
      const bool small_r = weighted_abs(f, n - 1, -c) > decay_tol * peak;
      check.diagnostic += small_r ? "does not decay at the small-r end"
                                  : "does not decay at the large-r end";
    }
  }
  return check;
}

}  // namespace twistcoh
