#include "twistcoh/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "twistcoh/coboundary.hpp"
#include "twistcoh/cocycle.hpp"
#include "twistcoh/mellin.hpp"
#include "twistcoh/parallel.hpp"

namespace twistcoh {

namespace {

constexpr double kCartanRoundTripTol = 1e-12;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

[[noreturn]] void config_error(std::string_view key, const std::string& what) {
  throw Error(Errc::ConfigError, std::string(key) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    config_error(key, "expected a finite number, got '" + s + "'");
  }
  return v;
}

long long parse_int(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    config_error(key, "expected an integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  config_error(key, "expected true/false, got '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const auto item = trim(text.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(parse_double(key, item));
    pos = comma + 1;
  }
  return out;
}

GammaSeries parse_series(std::string_view key, std::string_view text) {
  try {
    return parse_gamma_series(text);
  } catch (const Error& e) {
    config_error(key, e.what());
  }
}

GammaSeries flow_image(const GammaSeries& g, double m) { return g.apply_X() + cplx(m) * g; }

GammaSeries default_bump(double m) {
  return GammaSeries({{1.0, std::floor(m) + 2.0, 1.0}});
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions o;
  o.decay_tol = cfg.tol.decay;
  o.obstruction_rel_tol = cfg.tol.obstruction;
  o.eps_pole = cfg.tol.eps_pole;
  return o;
}

std::vector<std::pair<std::string, std::string>> rep_params(const ModelRepParams& p, double s) {
  std::vector<std::pair<std::string, std::string>> out{
      {"sigma", std::to_string(p.sigma)}, {"lambda1", short_num(p.lambda1)}, {"m", short_num(p.m)}};
  if (p.lambda2) out.emplace_back("lambda2", short_num(*p.lambda2));
  if (p.s0) out.emplace_back("s0", short_num(*p.s0));
  out.emplace_back("s", short_num(s));
  return out;
}

/// Rows and plot data produced by one case; merged in case order.
struct CaseOutput {
  std::vector<ReportRow> rows;
  std::vector<LineProfilePoint> line_profiles;
  std::vector<WeightedNormPoint> weighted_norms;
};

class RowFactory {
 public:
  RowFactory(const ExperimentConfig& cfg, std::string case_id,
             std::vector<std::pair<std::string, std::string>> params)
      : cfg_(cfg), case_id_(std::move(case_id)), params_(std::move(params)) {}

  ReportRow make(std::string quantity, double measured, double bound,
                 std::string relation = "<=") const {
    ReportRow row;
    row.suite = std::string(to_string(cfg_.suite));
    row.case_id = case_id_;
    row.params = params_;
    row.quantity = std::move(quantity);
    row.measured = measured;
    row.relation = std::move(relation);
    row.bound = bound;
    return row;
  }

  ReportRow error(const std::string& where, const std::exception& e) const {
    auto row = make("error:" + where, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN());
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
      row.flags.push_back(std::string(to_string(err->code())));
    }
    row.flags.push_back(e.what());
    return row;
  }

  const std::string& case_id() const { return case_id_; }

 private:
  const ExperimentConfig& cfg_;
  std::string case_id_;
  std::vector<std::pair<std::string, std::string>> params_;
};

std::vector<std::pair<std::string, std::string>> with_function(
    std::vector<std::pair<std::string, std::string>> params, const NamedSeries& fn) {
  params.insert(params.begin(), {"function", fn.series.to_string()});
  return params;
}

// ---- mellin-identities ----

CaseOutput mellin_case(const ExperimentConfig& cfg, const NamedSeries& fn) {
  CaseOutput out;
  const RowFactory rows(cfg, fn.name, with_function({}, fn));
  const auto grid = cfg.grid.make();
  try {
    const auto f = fn.series.sample(grid);
    out.rows.push_back(rows.make("parseval_defect", parseval_defect(f), cfg.tol.parseval));
    for (double a : cfg.mellin_lines) {
      if (!strip_admissible(f, Strip{a, a}, cfg.tol.decay).ok) continue;
      const std::string at = "@a=" + short_num(a);
      try {
        out.rows.push_back(rows.make("derivative_defect" + at,
                                     derivative_rule_defect(f, a, cfg.tol.decay),
                                     cfg.tol.derivative));
      } catch (const Error& e) {
        if (e.code() != Errc::NotAdmissible) throw;
      }
      const auto line = mellin_line(f, a, cfg.tol.decay);
      const double rt = relative_distance(mellin_inverse_line(line, grid), f);
      out.rows.push_back(rows.make("roundtrip_error" + at, rt, cfg.tol.roundtrip));
    }
  } catch (const std::exception& e) {
    out.rows.push_back(rows.error("mellin", e));
  }
  return out;
}

// ---- solve ----

void solve_rows(const ExperimentConfig& cfg, const NamedSeries& fn, const ModelRepParams& p,
                const RowFactory& rows, CaseOutput& out) {
  const auto grid = cfg.grid.make();
  const auto opts = solve_options(cfg);
  const auto g = fn.series.sample(grid);
  const auto rep = solve_mellin(g, p, cfg.s, cfg.solve_lines, cfg.t_grid, opts);
  const auto& f = rep.solution;

  auto residual = rows.make("residual", rep.residual, cfg.tol.solve);
  residual.flags = rep.flags;
  out.rows.push_back(std::move(residual));

  const auto fs = solve_semigroup(g, p.m);
  out.rows.push_back(
      rows.make("semigroup_agreement", relative_distance(fs, f), cfg.tol.solve));

  if (const auto exact = fn.series.semigroup_solution(p.m)) {
    const auto fe = exact->sample(grid);
    auto row = rows.make("oracle_error", relative_distance(f, fe), cfg.tol.solve);
    row.details.emplace_back("semigroup_oracle_error", relative_distance(fs, fe));
    row.params.emplace_back("oracle", exact->to_string());
    out.rows.push_back(std::move(row));
  }

  auto base = rows.make("base_norm_ratio", rep.base_norm_ratio, 1.0 + cfg.tol.base_bound);
  base.details.emplace_back("norm_f", norm(f));
  base.details.emplace_back("norm_g", norm(g));
  out.rows.push_back(std::move(base));

  const auto closed = fn.series.obstruction(p.m);
  if (closed || rep.obstruction_defined) {
    const double err = closed && rep.obstruction_defined
                           ? std::abs(rep.obstruction - *closed)
                           : std::numeric_limits<double>::infinity();
    auto row = rows.make("obstruction_error", err, cfg.tol.functional);
    row.details.emplace_back("D_re", rep.obstruction.real());
    row.details.emplace_back("D_im", rep.obstruction.imag());
    if (closed) row.details.emplace_back("D_closed_re", closed->real());
    if (!rep.obstruction_defined) row.flags.push_back("obstruction-undefined");
    out.rows.push_back(std::move(row));
  }

  if (cfg.solve_lines.size() > 1) {
    auto row = rows.make("coincidence_defect", rep.coincidence_defect, cfg.tol.solve);
    for (const auto& lp : rep.line_profiles) {
      row.details.emplace_back("line_norm_sq@a=" + short_num(lp.a), lp.norm_sq);
    }
    out.rows.push_back(std::move(row));
  }

  for (const auto& lp : rep.line_profiles) out.line_profiles.push_back({rows.case_id(), lp.a, lp.norm_sq});
  for (const auto& w : rep.weighted_norms) {
    out.weighted_norms.push_back({rows.case_id(), w.t, w.value, 0.0, 0.0});
  }
}

CaseOutput solve_case(const ExperimentConfig& cfg, const NamedSeries& fn) {
  CaseOutput out;
  const RowFactory rows(cfg, fn.name, with_function(rep_params(cfg.params, cfg.s), fn));
  try {
    solve_rows(cfg, fn, cfg.params, rows, out);
  } catch (const std::exception& e) {
    out.rows.push_back(rows.error("solve", e));
  }
  return out;
}

// ---- estimate-sweep ----

CaseOutput estimate_case(const ExperimentConfig& cfg, const NamedSeries& fn) {
  CaseOutput out;
  const RowFactory rows(cfg, fn.name, with_function(rep_params(cfg.params, cfg.s), fn));
  try {
    const auto g = fn.series.sample(cfg.grid.make());
    const auto table = estimate_sweep(g, cfg.params, cfg.s, cfg.t_grid, solve_options(cfg));
    for (const auto& r : table.rows) {
      auto row = rows.make("estimate_ratio@t=" + short_num(r.t), r.ratio,
                           cfg.tol.estimate_constant);
      row.params.emplace_back("bound_class", r.bound_class);
      row.details.emplace_back("lhs", r.lhs);
      row.details.emplace_back("rhs_norm", r.rhs_norm);
      if (r.near_resonance) row.flags.push_back("near-resonance");
      if (!r.admissible) row.flags.push_back("inadmissible");
      out.rows.push_back(std::move(row));
      out.weighted_norms.push_back({rows.case_id(), r.t, r.lhs, r.rhs_norm, r.ratio});
    }
    auto base = rows.make("base_norm_ratio", table.base_norm_ratio, 1.0 + cfg.tol.base_bound);
    base.details.emplace_back("empirical_constant", table.empirical_constant);
    base.details.emplace_back("empirical_constant_near", table.empirical_constant_near);
    base.flags = table.flags;
    out.rows.push_back(std::move(base));
  } catch (const std::exception& e) {
    out.rows.push_back(rows.error("estimate", e));
  }
  return out;
}

// ---- obstruction-scan ----

LogGrid extended_grid(const LogGrid& base, double x_max) {
  const double h = base.spacing();
  const auto n = static_cast<std::size_t>(std::llround((x_max - base.x_min()) / h)) + 1;
  return make_log_grid(n, base.x_min(), base.x_min() + static_cast<double>(n - 1) * h);
}

CaseOutput obstruction_case(const ExperimentConfig& cfg, const NamedSeries& fn) {
  CaseOutput out;
  const auto& p = cfg.params;
  const RowFactory rows(cfg, fn.name, with_function(rep_params(p, cfg.s), fn));
  const auto opts = solve_options(cfg);
  const auto bump_series = cfg.bump.value_or(default_bump(p.m));
  const auto closed = fn.series.obstruction(p.m);
  if (!closed) {
    auto row = rows.make("obstruction_defined", 0.0, 0.0);
    row.flags.push_back("obstruction-undefined");
    out.rows.push_back(std::move(row));
    return out;
  }
  try {
    const auto grid = cfg.grid.make();
    const auto g = fn.series.sample(grid);
    const cplx d = obstruction(g, p, opts);
    auto row = rows.make("obstruction_error", std::abs(d - *closed), cfg.tol.functional);
    row.details.emplace_back("D_re", d.real());
    row.details.emplace_back("D_closed_re", closed->real());
    out.rows.push_back(std::move(row));

    const auto image = flow_image(fn.series, p.m).sample(grid);
    const double inv = std::abs(obstruction(image, p, opts)) / norm(g);
    out.rows.push_back(rows.make("invariance_defect", inv, cfg.tol.functional));

    const auto bump = bump_series.sample(grid);
    const auto projected = project_obstruction(g, p, bump, opts);
    auto prow = rows.make("projected_obstruction", std::abs(obstruction(projected, p, opts)),
                          cfg.tol.projected);
    prow.params.emplace_back("bump", bump_series.to_string());
    out.rows.push_back(std::move(prow));

    if (cfg.extensions.size() >= 2) {
      // Short grids cannot resolve D numerically, so the projection uses the closed forms.
      const auto d_bump = bump_series.obstruction(p.m);
      if (!d_bump || *d_bump == cplx{}) {
        throw Error(Errc::DegenerateBump, "bump has no closed-form obstruction at this m");
      }
      const auto projected_series = fn.series - (*closed / *d_bump) * bump_series;
      const bool obstructed = std::abs(d) > obstruction_tolerance(g, opts);
      std::vector<double> raw_norms, proj_norms;
      for (double x_max : cfg.extensions) {
        const auto eg = extended_grid(grid, x_max);
        raw_norms.push_back(weighted_norm(solve_semigroup(fn.series.sample(eg), p.m), p.m));
        proj_norms.push_back(
            weighted_norm(solve_semigroup(projected_series.sample(eg), p.m), p.m));
      }
      auto add_norms = [&](ReportRow& r, const std::vector<double>& norms) {
        for (std::size_t i = 0; i < norms.size(); ++i) {
          r.details.emplace_back("norm@x_max=" + short_num(cfg.extensions[i]), norms[i]);
        }
      };
      if (obstructed) {
        double min_growth = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < raw_norms.size(); ++i) {
          min_growth = std::min(min_growth, raw_norms[i] / raw_norms[i - 1] - 1.0);
        }
        auto grow = rows.make("weighted_norm_growth", min_growth, cfg.tol.growth, ">=");
        add_norms(grow, raw_norms);
        out.rows.push_back(std::move(grow));
      }
      double drift = 0.0;
      for (std::size_t i = 1; i < proj_norms.size(); ++i) {
        drift = std::max(drift, std::abs(proj_norms[i] / proj_norms[i - 1] - 1.0));
      }
      auto stable = rows.make("projected_norm_drift", drift, cfg.tol.stability);
      add_norms(stable, proj_norms);
      out.rows.push_back(std::move(stable));
    }
  } catch (const std::exception& e) {
    out.rows.push_back(rows.error("obstruction", e));
  }
  return out;
}

// ---- cocycle ----

CaseOutput cocycle_case(const ExperimentConfig& cfg, const NamedSeries& fn) {
  CaseOutput out;
  const auto& c = cfg.cocycle;
  auto params = with_function(rep_params(cfg.params, cfg.s), fn);
  params.emplace_back("v", short_num(c.v));
  params.emplace_back("m1", short_num(c.m1));
  const RowFactory rows(cfg, fn.name, std::move(params));
  try {
    const auto grid = cfg.grid.make();
    const auto& h = fn.series;
    CocycleData data{(cplx(c.m1, c.v) * h).sample(grid), flow_image(h, cfg.params.m).sample(grid),
                     c.v, cfg.params.m, c.m1, cfg.params};
    const auto sol = common_solution(data, solve_options(cfg));
    out.rows.push_back(
        rows.make("compatibility_defect", sol.compatibility_defect, kCocycleCompatibilityTol));
    auto flow = rows.make("residual_flow", sol.residual_flow, cfg.tol.solve);
    flow.flags = sol.report.flags;
    out.rows.push_back(std::move(flow));
    out.rows.push_back(rows.make("residual_factor", sol.residual_factor, cfg.tol.solve));
    out.rows.push_back(rows.make("oracle_error",
                                 relative_distance(sol.report.solution, h.sample(grid)),
                                 cfg.tol.solve));

    const auto red = cartan_reduce(data.g1, data.g2, c.lambda, c.phi_x, data.m, data.m1);
    const auto [g1, g2] = cartan_recombine(red);
    const double rt = std::max(relative_distance(g1, data.g1), relative_distance(g2, data.g2));
    out.rows.push_back(rows.make("cartan_roundtrip", rt, kCartanRoundTripTol));
    out.rows.push_back(rows.make("cartan_second_residual",
                                 cartan_second_residual(red, sol.report.solution, cplx(0.0, c.v)),
                                 cfg.tol.solve));
  } catch (const std::exception& e) {
    out.rows.push_back(rows.error("cocycle", e));
  }
  return out;
}

template <class CaseFn>
SuiteResult run_cases(const ExperimentConfig& cfg, std::size_t n, CaseFn&& fn) {
  auto outputs = parallel_map<CaseOutput>(n, fn, cfg.threads);
  SuiteResult result;
  for (auto& o : outputs) {
    for (auto& r : o.rows) {
      grade(r, cfg.strict);
      result.rows.push_back(std::move(r));
    }
    result.line_profiles.insert(result.line_profiles.end(), o.line_profiles.begin(),
                                o.line_profiles.end());
    result.weighted_norms.insert(result.weighted_norms.end(), o.weighted_norms.begin(),
                                 o.weighted_norms.end());
  }
  return result;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string join_pairs(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += '|';
    out += f;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::ConfigError, "output: cannot write " + path.string());
  os << text;
}

}  // namespace

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::MellinIdentities: return "mellin-identities";
    case Suite::Solve: return "solve";
    case Suite::EstimateSweep: return "estimate-sweep";
    case Suite::ObstructionScan: return "obstruction-scan";
    case Suite::Cocycle: return "cocycle";
    case Suite::PerturbationSweep: return "perturbation-sweep";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (auto s : {Suite::MellinIdentities, Suite::Solve, Suite::EstimateSweep,
                 Suite::ObstructionScan, Suite::Cocycle, Suite::PerturbationSweep}) {
    if (to_string(s) == trim(name)) return s;
  }
  config_error("suite", "unknown suite '" + std::string(name) + "'");
}

LogGrid GridSpec::make() const {
  if (n_points < 16) config_error("grid.n_points", "must be at least 16");
  try {
    return make_log_grid(static_cast<std::size_t>(n_points), x_min, x_max);
  } catch (const Error& e) {
    config_error("grid", e.what());
  }
}

GridSpec GridSpec::parse(std::string_view text) {
  const auto v = parse_list("grid", text);
  if (v.size() != 3 || v[0] != std::floor(v[0])) {
    config_error("grid", "expected N,XMIN,XMAX");
  }
  return GridSpec{static_cast<long long>(v[0]), v[1], v[2]};
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::optional<std::string> family;
  std::vector<NamedSeries> inline_functions;
  std::set<std::string> seen;

  using Setter = std::function<void(std::string_view key, std::string_view value)>;
  auto real = [](double& slot) {
    return Setter([&slot](std::string_view k, std::string_view v) { slot = parse_double(k, v); });
  };
  auto list = [](std::vector<double>& slot) {
    return Setter([&slot](std::string_view k, std::string_view v) { slot = parse_list(k, v); });
  };
  const std::map<std::string, Setter, std::less<>> setters{
      {"grid.n_points", [&](auto k, auto v) { cfg.grid.n_points = parse_int(k, v); }},
      {"grid.x_min", real(cfg.grid.x_min)},
      {"grid.x_max", real(cfg.grid.x_max)},
      {"rep.sigma", [&](auto k, auto v) { cfg.params.sigma = static_cast<int>(parse_int(k, v)); }},
      {"rep.lambda1", real(cfg.params.lambda1)},
      {"rep.lambda2", [&](auto k, auto v) { cfg.params.lambda2 = parse_double(k, v); }},
      {"rep.s0", [&](auto k, auto v) { cfg.params.s0 = parse_double(k, v); }},
      {"twist.m", real(cfg.params.m)},
      {"solve.s", real(cfg.s)},
      {"solve.t_grid", list(cfg.t_grid)},
      {"solve.lines", list(cfg.solve_lines)},
      {"mellin.lines", list(cfg.mellin_lines)},
      {"obstruction.extensions", list(cfg.extensions)},
      {"obstruction.bump", [&](auto k, auto v) { cfg.bump = parse_series(k, v); }},
      {"functions.family", [&](auto k, auto v) {
         family = std::string(trim(v));
         if (*family != "closed-form" && *family != "none") {
           config_error(k, "expected closed-form or none");
         }
       }},
      {"suite", [&](auto, auto v) { cfg.suite = parse_suite(v); }},
      {"tol.decay", real(cfg.tol.decay)},
      {"tol.obstruction", real(cfg.tol.obstruction)},
      {"tol.eps_pole", real(cfg.tol.eps_pole)},
      {"tol.parseval", real(cfg.tol.parseval)},
      {"tol.derivative", real(cfg.tol.derivative)},
      {"tol.roundtrip", real(cfg.tol.roundtrip)},
      {"tol.solve", real(cfg.tol.solve)},
      {"tol.functional", real(cfg.tol.functional)},
      {"tol.projected", real(cfg.tol.projected)},
      {"tol.base_bound", real(cfg.tol.base_bound)},
      {"tol.estimate_constant", real(cfg.tol.estimate_constant)},
      {"tol.growth", real(cfg.tol.growth)},
      {"tol.stability", real(cfg.tol.stability)},
      {"cocycle.v", real(cfg.cocycle.v)},
      {"cocycle.m1", real(cfg.cocycle.m1)},
      {"cocycle.lambda", real(cfg.cocycle.lambda)},
      {"cocycle.phi_x", real(cfg.cocycle.phi_x)},
      {"perturb.delta", real(cfg.perturb.delta)},
      {"perturb.steps", [&](auto k, auto v) { cfg.perturb.steps = static_cast<int>(parse_int(k, v)); }},
      {"output.dir", [&](auto, auto v) { cfg.out_dir = std::string(trim(v)); }},
      {"output.prefix", [&](auto, auto v) { cfg.prefix = std::string(trim(v)); }},
      {"run.threads", [&](auto k, auto v) {
         const auto n = parse_int(k, v);
         if (n < 0) config_error(k, "must be >= 0");
         cfg.threads = static_cast<unsigned>(n);
       }},
      {"run.strict", [&](auto k, auto v) { cfg.strict = parse_bool(k, v); }},
  };

  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const auto nl = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      config_error("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) config_error(key, "duplicate key");
    if (key.rfind("functions.", 0) == 0 && key != "functions.family") {
      const auto name = key.substr(std::string("functions.").size());
      if (name.empty()) config_error(key, "function name missing");
      inline_functions.push_back({name, parse_series(key, value)});
      continue;
    }
    const auto it = setters.find(key);
    if (it == setters.end()) config_error(key, "unknown key");
    it->second(key, value);
  }

  if (family.value_or(inline_functions.empty() ? "closed-form" : "none") == "closed-form") {
    cfg.functions = closed_form_family();
  }
  cfg.functions.insert(cfg.functions.end(), inline_functions.begin(), inline_functions.end());
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::ConfigError, "config: cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.grid.n_points < 16) config_error("grid.n_points", "must be at least 16");
  if (!(cfg.grid.x_min < cfg.grid.x_max)) config_error("grid.x_max", "must exceed grid.x_min");
  (void)cfg.grid.make();

  const auto& p = cfg.params;
  if (p.sigma != 1 && p.sigma != -1) config_error("rep.sigma", "must be +1 or -1");
  if (p.lambda1 == 0.0) config_error("rep.lambda1", "must be nonzero");
  if (!(p.m > 0.0)) config_error("twist.m", "must be positive");
  if (p.s0 && !p.lambda2) config_error("rep.s0", "requires rep.lambda2");
  if (p.s0 && *p.s0 == 0.0) config_error("rep.s0", "must be nonzero");
  if (!(cfg.s >= 0.0)) config_error("solve.s", "must be nonnegative");

  const std::pair<const char*, double> tols[] = {
      {"tol.decay", cfg.tol.decay},           {"tol.obstruction", cfg.tol.obstruction},
      {"tol.eps_pole", cfg.tol.eps_pole},     {"tol.parseval", cfg.tol.parseval},
      {"tol.derivative", cfg.tol.derivative}, {"tol.roundtrip", cfg.tol.roundtrip},
      {"tol.solve", cfg.tol.solve},           {"tol.functional", cfg.tol.functional},
      {"tol.projected", cfg.tol.projected},   {"tol.base_bound", cfg.tol.base_bound},
      {"tol.estimate_constant", cfg.tol.estimate_constant},
      {"tol.growth", cfg.tol.growth},         {"tol.stability", cfg.tol.stability},
  };
  for (const auto& [key, v] : tols) {
    if (!(v > 0.0)) config_error(key, "tolerance must be positive");
  }
  for (double t : cfg.t_grid) {
    if (t < 0.0) config_error("solve.t_grid", "orders must be nonnegative");
  }
  for (const auto& fn : cfg.functions) {
    for (const auto& term : fn.series.terms()) {
      if (!(term.c > 0.0)) config_error("functions." + fn.name, "term exponent c must be > 0");
    }
  }
  if (cfg.functions.empty()) config_error("functions.family", "no test functions selected");
  if (cfg.suite == Suite::Cocycle && cfg.cocycle.v == 0.0) {
    config_error("cocycle.v", "must be nonzero");
  }
  if (cfg.suite == Suite::PerturbationSweep) {
    if (cfg.perturb.steps < 1) config_error("perturb.steps", "must be at least 1");
    if (!(cfg.perturb.delta >= 0.0) || !(cfg.perturb.delta < 0.5 * p.m)) {
      config_error("perturb.delta", "must satisfy 0 <= delta < m/2");
    }
  }
  if (cfg.prefix.empty()) config_error("output.prefix", "must not be empty");
}

void grade(ReportRow& row, bool strict) {
  const bool finite = std::isfinite(row.measured) && !std::isnan(row.bound);
  const bool ok = row.relation == ">=" ? row.measured >= row.bound : row.measured <= row.bound;
  row.pass = finite && ok && !(strict && !row.flags.empty());
}

bool SuiteResult::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

SuiteResult perturbation_sweep(const ExperimentConfig& cfg, PerturbationSummary* summary) {
  const auto& base = cfg.params;
  base.validate();
  const double delta = cfg.perturb.delta;
  const int steps = cfg.perturb.steps;
  if (steps < 1) config_error("perturb.steps", "must be at least 1");
  if (!(delta >= 0.0) || !(delta < 0.5 * base.m)) {
    config_error("perturb.delta", "must satisfy 0 <= delta < m/2");
  }
  const int n_side = delta == 0.0 ? 1 : steps;
  auto offset = [&](int i) {
    return n_side == 1 ? 0.0 : -0.5 * delta + delta * i / (n_side - 1);
  };

  struct Point {
    ModelRepParams p;
    std::size_t fn;
  };
  std::vector<Point> points;
  for (int i = 0; i < n_side; ++i) {
    for (int j = 0; j < n_side; ++j) {
      for (std::size_t k = 0; k < cfg.functions.size(); ++k) {
        auto p = base;
        p.lambda1 += offset(i);
        p.m += offset(j);
        points.push_back({p, k});
      }
    }
  }

  const double uniform = 2.0 / base.m;
  struct PointOut {
    ReportRow row;
    double base_ratio = 0.0;
    double constant = 0.0;
    bool ok = false;
  };
  auto outputs = parallel_map<PointOut>(
      points.size(),
      [&](std::size_t idx) {
        const auto& pt = points[idx];
        const auto& fn = cfg.functions[pt.fn];
        auto params = with_function(rep_params(pt.p, cfg.s), fn);
        params.emplace_back("delta", short_num(delta));
        const RowFactory rows(cfg, fn.name + "@" + std::to_string(idx / cfg.functions.size()),
                              std::move(params));
        PointOut out;
        try {
          const auto opts = solve_options(cfg);
          const auto g = fn.series.sample(cfg.grid.make());
          const double zero_line[] = {0.0};
          const auto rep = solve_mellin(g, pt.p, cfg.s, zero_line, {}, opts);
          const auto table = estimate_sweep(g, pt.p, cfg.s, cfg.t_grid, opts);
          const double g_norm = norm(g);
          const double ratio = g_norm == 0.0 ? 0.0 : norm(rep.solution) / g_norm;
          out.row = rows.make("norm_ratio", ratio, uniform);
          out.row.details.emplace_back("base_norm_ratio", rep.base_norm_ratio);
          out.row.details.emplace_back("empirical_constant", table.empirical_constant);
          out.base_ratio = rep.base_norm_ratio;
          out.constant = table.empirical_constant;
          out.ok = true;
        } catch (const std::exception& e) {
          out.row = rows.error("perturbation", e);
        }
        return out;
      },
      cfg.threads);

  SuiteResult result;
  PerturbationSummary sum;
  bool first = true;
  for (auto& o : outputs) {
    grade(o.row, cfg.strict);
    result.rows.push_back(std::move(o.row));
    if (!o.ok) continue;
    ++sum.points;
    if (first) {
      sum.base_ratio_min = sum.base_ratio_max = o.base_ratio;
      sum.constant_min = sum.constant_max = o.constant;
      first = false;
    }
    sum.base_ratio_min = std::min(sum.base_ratio_min, o.base_ratio);
    sum.base_ratio_max = std::max(sum.base_ratio_max, o.base_ratio);
    sum.constant_min = std::min(sum.constant_min, o.constant);
    sum.constant_max = std::max(sum.constant_max, o.constant);
  }
  const RowFactory rows(cfg, "summary", rep_params(base, cfg.s));
  auto row = rows.make("base_norm_ratio_max", sum.base_ratio_max, 1.0 + cfg.tol.base_bound);
  row.details.emplace_back("base_norm_ratio_min", sum.base_ratio_min);
  row.details.emplace_back("empirical_constant_min", sum.constant_min);
  row.details.emplace_back("empirical_constant_max", sum.constant_max);
  row.details.emplace_back("points", static_cast<double>(sum.points));
  grade(row, cfg.strict);
  result.rows.push_back(std::move(row));
  if (summary) *summary = sum;
  return result;
}

SuiteResult run_suite(const ExperimentConfig& cfg) {
  const auto n = cfg.functions.size();
  auto over = [&](CaseOutput (*fn)(const ExperimentConfig&, const NamedSeries&)) {
    return run_cases(cfg, n, [&](std::size_t i) { return fn(cfg, cfg.functions[i]); });
  };
  switch (cfg.suite) {
    case Suite::MellinIdentities: return over(mellin_case);
    case Suite::Solve: return over(solve_case);
    case Suite::EstimateSweep: return over(estimate_case);
    case Suite::ObstructionScan: return over(obstruction_case);
    case Suite::Cocycle: return over(cocycle_case);
    case Suite::PerturbationSweep: return perturbation_sweep(cfg);
  }
  return {};
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "suite,case_id,params,quantity,measured,relation,bound,pass,flags,details\n";
  for (const auto& r : rows) {
    std::string details;
    for (const auto& [k, v] : r.details) {
      if (!details.empty()) details += ';';
      details += k + "=" + num(v);
    }
    out += csv_field(r.suite) + ',' + csv_field(r.case_id) + ',' + csv_field(join_pairs(r.params)) +
           ',' + csv_field(r.quantity) + ',' + num(r.measured) + ',' + r.relation + ',' +
           num(r.bound) + ',' + (r.pass ? "true" : "false") + ',' +
           csv_field(join_flags(r.flags)) + ',' + csv_field(details) + '\n';
  }
  return out;
}

std::string report_json(const std::vector<ReportRow>& rows) {
  auto number = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return num(v);
  };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.details) details[k] = number(v);
    arr.push_back({{"suite", r.suite},
                   {"case_id", r.case_id},
                   {"params", params},
                   {"quantity", r.quantity},
                   {"measured", number(r.measured)},
                   {"relation", r.relation},
                   {"bound", number(r.bound)},
                   {"pass", r.pass},
                   {"flags", r.flags},
                   {"details", details}});
  }
  return arr.dump(2) + "\n";
}

std::string line_profiles_csv(const std::vector<LineProfilePoint>& points) {
  std::string out = "case_id,a,norm_sq\n";
  for (const auto& p : points) out += csv_field(p.case_id) + ',' + num(p.a) + ',' + num(p.norm_sq) + '\n';
  return out;
}

std::string weighted_norms_csv(const std::vector<WeightedNormPoint>& points) {
  std::string out = "case_id,t,lhs,rhs_norm,ratio\n";
  for (const auto& p : points) {
    out += csv_field(p.case_id) + ',' + num(p.t) + ',' + num(p.lhs) + ',' + num(p.rhs) + ',' +
           num(p.ratio) + '\n';
  }
  return out;
}

RunOutcome run(const std::filesystem::path& config_path, const RunOverrides& overrides) {
  auto cfg = load_config(config_path);
  if (overrides.suite) cfg.suite = *overrides.suite;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.grid) cfg.grid = *overrides.grid;
  if (overrides.strict) cfg.strict = true;
  validate(cfg);

  RunOutcome outcome;
  outcome.result = run_suite(cfg);

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(Errc::ConfigError, "output.dir: " + ec.message());
  const std::string stem = cfg.prefix + "_" + std::string(to_string(cfg.suite));
  auto emit = [&](const std::string& name, const std::string& text) {
    const auto path = cfg.out_dir / name;
    write_file(path, text);
    outcome.files.push_back(path);
  };
  emit(stem + ".csv", report_csv(outcome.result.rows));
  emit(stem + ".json", report_json(outcome.result.rows));
  if (!outcome.result.line_profiles.empty()) {
    emit(stem + "_line_profiles.csv", line_profiles_csv(outcome.result.line_profiles));
  }
  if (!outcome.result.weighted_norms.empty()) {
    emit(stem + "_weighted_norms.csv", weighted_norms_csv(outcome.result.weighted_norms));
  }
  outcome.exit_code = outcome.result.all_pass() ? 0 : 1;
  return outcome;
}

}  // namespace twistcoh
