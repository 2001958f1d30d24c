#include "twistcoh/model_reps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twistcoh/mellin.hpp"

namespace twistcoh {

namespace {

constexpr double kSpectralFloor = 1e-6;

// log(1 + e^y) without overflow
double softplus(double y) { return std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y))); }

HalfLineFunction imaginary_power_multiplier(const HalfLineFunction& f, double coeff,
                                            double lambda) {
  HalfLineFunction out(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] == cplx{}) continue;
    // r^{-lambda} = e^{lambda x}
    out[j] = cplx(0.0, coeff) * std::exp(lambda * f.grid().x(j)) * f[j];
  }
  return out;
}

}  // namespace

void ModelRepParams::validate() const {
  if (sigma != 1 && sigma != -1) throw Error(Errc::InvalidParams, "sigma must be +1 or -1");
  if (lambda1 == 0.0 || !std::isfinite(lambda1)) {
    throw Error(Errc::InvalidParams, "lambda1 must be finite and nonzero");
  }
  if (!(m > 0.0) || !std::isfinite(m)) throw Error(Errc::InvalidParams, "twist m must be > 0");
  if (s0) {
    if (*s0 == 0.0) throw Error(Errc::InvalidParams, "s0 must be nonzero");
    if (!lambda2) throw Error(Errc::InvalidParams, "s0 given without lambda2");
  }
}

HalfLineFunction apply_X(const HalfLineFunction& f) {
  auto out = spectral_dx(f, 0.0);
  const double floor = kSpectralFloor * f.max_abs();
  if (floor == 0.0) return out;
  // The FFT leaves an absolute roundoff floor everywhere; where f itself is below it,
  // local differences keep the derivative relatively accurate for later r^{-lambda} weights.
  const auto local = log_derivative_fd(f);
  const auto n = static_cast<long>(f.size());
  for (long j = 0; j < n; ++j) {
    double nearby = 0.0;
    for (long i = std::max(0L, j - 3); i <= std::min(n - 1, j + 3); ++i) {
      nearby = std::max(nearby, std::abs(f[static_cast<std::size_t>(i)]));
    }
    if (nearby < floor) out[static_cast<std::size_t>(j)] = -local[static_cast<std::size_t>(j)];
  }
  return out;
}

HalfLineFunction apply_u1(const HalfLineFunction& f, const ModelRepParams& p) {
  return imaginary_power_multiplier(f, static_cast<double>(p.sigma), p.lambda1);
}

HalfLineFunction apply_u2(const HalfLineFunction& f, const ModelRepParams& p) {
  if (!p.has_u2()) throw Error(Errc::MissingParams, "u2 needs both s0 and lambda2");
  return imaginary_power_multiplier(f, *p.s0, *p.lambda2);
}

HalfLineFunction apply_generator(Generator g, const HalfLineFunction& f,
                                 const ModelRepParams& p) {
  switch (g) {
    case Generator::X: return apply_X(f);
    case Generator::U1: return apply_u1(f, p);
    case Generator::U2: return apply_u2(f, p);
  }
  return f;
}

FlowResult flow_action(const HalfLineFunction& f, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(Errc::InvalidParams, "flow time s must be positive");
  }
  const double h = f.grid().spacing();
  const double log_s = std::log(s);
  const long shift = std::lround(log_s / h);
  const auto n = static_cast<long>(f.size());

  HalfLineFunction out(f.grid());
  std::size_t vacated = 0;
  for (long j = 0; j < n; ++j) {
    const long src = j + shift;
    if (src < 0 || src >= n) {
      ++vacated;
      continue;
    }
    out[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>(src)];
  }
  return FlowResult{std::move(out), shift, log_s - static_cast<double>(shift) * h, vacated};
}

HalfLineFunction fractional_weight(const HalfLineFunction& f, double t, double lambda) {
  HalfLineFunction out(f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] == cplx{}) continue;
    const double log_mult = 0.5 * t * softplus(2.0 * lambda * f.grid().x(j));
    out[j] = std::exp(log_mult) * f[j];
  }
  return out;
}

HalfLineFunction fractional_weight(const HalfLineFunction& f, double t,
                                   const ModelRepParams& p) {
  return fractional_weight(f, t, p.lambda1);
}

double sobolev_norm(const HalfLineFunction& f, int k, const ModelRepParams& p,
                    std::span<const Generator> generators, int max_order) {
  if (k < 0) throw Error(Errc::InvalidParams, "Sobolev order must be nonnegative");
  if (k > max_order) {
    throw Error(Errc::InvalidParams, "Sobolev order " + std::to_string(k) +
                                         " exceeds the cap " + std::to_string(max_order));
  }
  for (auto g : generators) {
    if (g == Generator::U2 && !p.has_u2()) {
      throw Error(Errc::MissingParams, "u2 requested but s0/lambda2 are absent");
    }
  }
  double total = std::pow(norm(f), 2);
  // breadth-first over words: level l holds Y_1...Y_l f for every word of length l
  std::vector<HalfLineFunction> level{f};
  for (int len = 1; len <= k; ++len) {
    std::vector<HalfLineFunction> next;
    next.reserve(level.size() * generators.size());
    for (const auto& v : level) {
      for (auto g : generators) {
        next.push_back(apply_generator(g, v, p));
        total += std::pow(norm(next.back()), 2);
      }
    }
    level = std::move(next);
  }
  return std::sqrt(total);
}

}  // namespace twistcoh
