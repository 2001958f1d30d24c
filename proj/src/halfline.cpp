#include "twistcoh/halfline.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace twistcoh {

namespace {

// exp(a*x) * |v| without overflowing the exponential when |v| is tiny.
double scaled_abs(double v_abs, double ax) {
  if (v_abs == 0.0) return 0.0;
  if (ax < 700.0) return v_abs * std::exp(ax);
  return std::exp(std::log(v_abs) + ax);
}

cplx scaled(cplx v, double ax) {
  if (v == cplx{}) return v;
  if (ax < 700.0) return v * std::exp(ax);
  return std::polar(std::exp(std::log(std::abs(v)) + ax), std::arg(v));
}

}  // namespace

LogGrid make_log_grid(std::size_t n_points, double x_min, double x_max) {
  if (n_points < 16) {
    throw Error(Errc::InvalidGrid, "n_points must be >= 16, got " + std::to_string(n_points));
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw Error(Errc::InvalidGrid, "need finite x_min < x_max");
  }
  return LogGrid(n_points, x_min, x_max);
}

LogGrid default_grid() { return make_log_grid(4096, -8.0, 56.0); }

HalfLineFunction::HalfLineFunction(LogGrid grid)
    : grid_(grid), values_(grid.size(), cplx{}) {}

HalfLineFunction::HalfLineFunction(LogGrid grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(Errc::GridMismatch, "value count does not match grid size");
  }
}

double HalfLineFunction::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double weighted_abs(const HalfLineFunction& f, std::size_t j, double a) {
  return scaled_abs(std::abs(f[j]), a * f.grid().x(j));
}

double weighted_norm(const HalfLineFunction& f, double a) {
  const auto n = f.size();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = weighted_abs(f, j, a);
    const double term = w * w;
    sum += (j == 0 || j + 1 == n) ? 0.5 * term : term;
  }
  return std::sqrt(sum * f.grid().spacing());
}

cplx inner(const HalfLineFunction& f, const HalfLineFunction& g) {
  require_same_grid(f, g);
  std::vector<cplx> prod(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) prod[j] = f[j] * std::conj(g[j]);
  return integrate_dx(f.grid(), prod);
}

bool decay_admissible(const HalfLineFunction& f, double a, double tol) {
  const auto n = f.size();
  double peak = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = weighted_abs(f, j, a);
    if (!std::isfinite(w)) return false;
    peak = std::max(peak, w);
  }
  const double lo_end = weighted_abs(f, 0, a);
  const double hi_end = weighted_abs(f, n - 1, a);
  return lo_end <= tol * peak && hi_end <= tol * peak;
}

void require_same_grid(const HalfLineFunction& f, const HalfLineFunction& g) {
  if (!(f.grid() == g.grid())) {
    throw Error(Errc::GridMismatch, "functions live on different grids");
  }
}

HalfLineFunction lin_comb(cplx alpha, const HalfLineFunction& f, cplx beta,
                          const HalfLineFunction& g) {
  require_same_grid(f, g);
  std::vector<cplx> v(f.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = alpha * f[j] + beta * g[j];
  return HalfLineFunction(f.grid(), std::move(v));
}

HalfLineFunction reweight(const HalfLineFunction& f, double a) {
  HalfLineFunction out(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = scaled(f[j], a * f.grid().x(j));
  return out;
}

double relative_distance(const HalfLineFunction& f, const HalfLineFunction& g) {
  const double diff = norm(lin_comb(1.0, f, -1.0, g));
  const double ref = norm(g);
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / ref;
}

cplx integrate_dx(const LogGrid& grid, std::span<const cplx> values) {
  cplx sum{};
  const auto n = values.size();
  for (std::size_t j = 0; j < n; ++j) {
    sum += (j == 0 || j + 1 == n) ? 0.5 * values[j] : values[j];
  }
  return sum * grid.spacing();
}

}  // namespace twistcoh
