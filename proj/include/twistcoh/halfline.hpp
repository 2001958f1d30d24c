#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "twistcoh/error.hpp"

namespace twistcoh {

using cplx = std::complex<double>;

inline constexpr double kDefaultDecayTol = 1e-10;

/// Uniform grid in x = -log r covering the half-line r > 0.
///
/// Nodes are x_j = x_min + j*h and r_j = exp(-x_j), so r_j decreases with j:
/// index 0 is the large-r end, index n-1 the small-r end. The measure dr/r
/// becomes dx, which turns Mellin transforms into Fourier transforms.
class LogGrid {
 public:
  std::size_t size() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double spacing() const noexcept { return h_; }
  double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * h_; }
  double r(std::size_t j) const noexcept { return std::exp(-x(j)); }
  /// Length of the periodic cell seen by the DFT, n*h.
  double period() const noexcept { return static_cast<double>(n_) * h_; }

  friend bool operator==(const LogGrid&, const LogGrid&) = default;

 private:
  friend LogGrid make_log_grid(std::size_t, double, double);
  LogGrid(std::size_t n, double x_min, double x_max)
      : n_(n), x_min_(x_min), x_max_(x_max), h_((x_max - x_min) / static_cast<double>(n - 1)) {}

  std::size_t n_;
  double x_min_;
  double x_max_;
  double h_;
};

/// Requires n_points >= 16 and x_min < x_max (both finite); throws InvalidGrid otherwise.
LogGrid make_log_grid(std::size_t n_points, double x_min, double x_max);

/// The grid used by experiments unless overridden: 4096 nodes on x in [-8, 56].
LogGrid default_grid();

/// Complex samples f(r_j) on a LogGrid; a vector of L^2(R+, dr/r).
class HalfLineFunction {
 public:
  explicit HalfLineFunction(LogGrid grid);
  HalfLineFunction(LogGrid grid, std::vector<cplx> values);

  const LogGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  const cplx& operator[](std::size_t j) const { return values_[j]; }
  cplx& operator[](std::size_t j) { return values_[j]; }

  /// max_j |f(r_j)|
  double max_abs() const;

 private:
  LogGrid grid_;
  std::vector<cplx> values_;
};

template <class F>
concept PointwiseExpr = std::invocable<F, double> &&
    std::convertible_to<std::invoke_result_t<F, double>, cplx>;

/// values[j] = expr(r_j); throws NonFiniteSample if any sample is NaN/Inf.
template <PointwiseExpr F>
HalfLineFunction sample(F&& expr, const LogGrid& grid) {
  std::vector<cplx> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const cplx z = static_cast<cplx>(expr(grid.r(j)));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(Errc::NonFiniteSample,
                  "expression is not finite at r = " + std::to_string(grid.r(j)));
    }
    v[j] = z;
  }
  return HalfLineFunction(grid, std::move(v));
}

/// Samples a function given in the log coordinate: values[j] = expr(x_j).
template <PointwiseExpr F>
HalfLineFunction sample_in_x(F&& expr, const LogGrid& grid) {
  return sample([&](double r) { return static_cast<cplx>(expr(-std::log(r))); }, grid);
}

/// |f(r_j)| * r_j^{-a}, computed without forming 0*inf.
double weighted_abs(const HalfLineFunction& f, std::size_t j, double a);

/// ||f r^{-a}||_E by the trapezoidal rule in x. May be +Inf; never throws.
double weighted_norm(const HalfLineFunction& f, double a);

inline double norm(const HalfLineFunction& f) { return weighted_norm(f, 0.0); }

/// <f, g>_E = integral of f conj(g) dx (trapezoidal).
cplx inner(const HalfLineFunction& f, const HalfLineFunction& g);

/// Endpoint decay of f r^{-a}: both boundary samples are at most tol times the peak.
bool decay_admissible(const HalfLineFunction& f, double a, double tol = kDefaultDecayTol);

/// alpha f + beta g; throws GridMismatch when the grids differ.
HalfLineFunction lin_comb(cplx alpha, const HalfLineFunction& f, cplx beta,
                          const HalfLineFunction& g);

/// f * r^{-a}
HalfLineFunction reweight(const HalfLineFunction& f, double a);

/// ||f - g|| / ||g||, with 0/0 read as 0.
double relative_distance(const HalfLineFunction& f, const HalfLineFunction& g);

/// Trapezoidal integral of the samples over x.
cplx integrate_dx(const LogGrid& grid, std::span<const cplx> values);

void require_same_grid(const HalfLineFunction& f, const HalfLineFunction& g);

}  // namespace twistcoh
