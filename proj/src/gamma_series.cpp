#include "twistcoh/gamma_series.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace twistcoh {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// ∫_0^∞ r^{p-1} e^{-q r} dr
double gamma_integral(double p, double q) {
  return std::exp(std::lgamma(p) - p * std::log(q));
}

bool is_positive_integer(double v, long& out) {
  const double rounded = std::round(v);
  if (std::abs(v - rounded) > 1e-12 || rounded < 1.0) return false;
  out = static_cast<long>(rounded);
  return true;
}

}  // namespace

GammaSeries::GammaSeries(std::vector<GammaTerm> terms) : terms_(std::move(terms)) {}

cplx GammaSeries::operator()(double r) const {
  cplx sum{};
  for (const auto& t : terms_) {
    if (t.coef == cplx{}) continue;
    sum += t.coef * std::exp(t.k * std::log(r) - t.c * r);
  }
  return sum;
}

HalfLineFunction GammaSeries::sample(const LogGrid& grid) const {
  return twistcoh::sample([this](double r) { return (*this)(r); }, grid);
}

GammaSeries operator+(const GammaSeries& a, const GammaSeries& b) {
  auto terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return GammaSeries(std::move(terms));
}

GammaSeries operator*(cplx s, const GammaSeries& a) {
  auto terms = a.terms_;
  for (auto& t : terms) t.coef *= s;
  return GammaSeries(std::move(terms));
}

GammaSeries operator-(const GammaSeries& a, const GammaSeries& b) { return a + (-1.0 * b); }

GammaSeries GammaSeries::apply_X() const {
  std::vector<GammaTerm> out;
  for (const auto& t : terms_) {
    if (t.k != 0.0) out.push_back({-t.k * t.coef, t.k, t.c});
    out.push_back({t.c * t.coef, t.k + 1.0, t.c});
  }
  return GammaSeries(std::move(out));
}

GammaSeries GammaSeries::times_power(double p) const {
  auto terms = terms_;
  for (auto& t : terms) t.k += p;
  return GammaSeries(std::move(terms));
}

std::optional<double> GammaSeries::weighted_norm(double a) const {
  double total = 0.0;
  for (const auto& ti : terms_) {
    for (const auto& tj : terms_) {
      const double p = ti.k + tj.k - 2.0 * a;
      if (!(p > 0.0)) return std::nullopt;
      total += (ti.coef * std::conj(tj.coef)).real() * gamma_integral(p, ti.c + tj.c);
    }
  }
  return std::sqrt(std::max(total, 0.0));
}

std::optional<cplx> GammaSeries::mellin(double c) const {
  cplx sum{};
  for (const auto& t : terms_) {
    const double p = t.k + c;
    if (!(p > 0.0)) return std::nullopt;
    sum += t.coef * gamma_integral(p, t.c);
  }
  return sum * kInvSqrt2Pi;
}

std::optional<GammaSeries> GammaSeries::semigroup_solution(double m) const {
  // ∫_r^∞ ρ^{n-1} e^{-cρ} dρ = (n-1)! c^{-n} e^{-cr} Σ_{j<n} (c r)^j / j!
  std::vector<GammaTerm> out;
  for (const auto& t : terms_) {
    long n = 0;
    if (!is_positive_integer(t.k - m, n)) return std::nullopt;
    double factorial_ratio = std::tgamma(static_cast<double>(n));  // (n-1)!/j!, j = 0
    for (long j = 0; j < n; ++j) {
      if (j > 0) factorial_ratio /= static_cast<double>(j);
      const double scale = factorial_ratio * std::pow(t.c, static_cast<double>(j - n));
      out.push_back({t.coef * scale, m + static_cast<double>(j), t.c});
    }
  }
  return GammaSeries(std::move(out));
}

std::string GammaSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    char buf[128];
    if (t.coef.imag() == 0.0) {
      std::snprintf(buf, sizeof buf, "%g*r^%g*e^(-%g r)", t.coef.real(), t.k, t.c);
    } else {
      std::snprintf(buf, sizeof buf, "(%g%+gi)*r^%g*e^(-%g r)", t.coef.real(), t.coef.imag(),
                    t.k, t.c);
    }
    os << buf;
  }
  return first ? "0" : os.str();
}

std::vector<NamedSeries> closed_form_family() {
  std::vector<NamedSeries> family;
  for (double k : {1.0, 2.0, 3.0}) {
    for (double c : {1.0, 2.0}) {
      GammaSeries g({{1.0, k, c}});
      family.push_back({"k" + std::to_string(static_cast<int>(k)) + "c" +
                            std::to_string(static_cast<int>(c)),
                        g});
    }
  }
  GammaSeries p2({{1.0, 2.0, 1.0}, {-2.0, 2.0, 2.0}});
  GammaSeries p3({{1.0, 3.0, 1.0}, {-4.0, 3.0, 2.0}});
  family.push_back({"k2c1-2k2c2", p2});
  family.push_back({"k3c1-4k3c2", p3});
  return family;
}

GammaSeries parse_gamma_series(std::string_view text) {
  std::vector<GammaTerm> terms;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find('(', pos);
    if (open == std::string_view::npos) break;
    const auto close = text.find(')', open);
    if (close == std::string_view::npos) {
      throw Error(Errc::ConfigError, "unbalanced parenthesis in term list");
    }
    std::string body(text.substr(open + 1, close - open - 1));
    for (auto& ch : body) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream is(body);
    double coef = 0, k = 0, c = 0;
    std::string rest;
    if (!(is >> coef >> k >> c) || (is >> rest)) {
      throw Error(Errc::ConfigError, "term must be (coefficient, k, c): '" + body + "'");
    }
    if (!(c > 0.0)) throw Error(Errc::ConfigError, "term exponent c must be > 0");
    if (k < 0.0) throw Error(Errc::ConfigError, "term power k must be >= 0");
    terms.push_back({coef, k, c});
    pos = close + 1;
  }
  if (terms.empty()) throw Error(Errc::ConfigError, "no (coefficient, k, c) terms found");
  return GammaSeries(std::move(terms));
}

}  // namespace twistcoh
