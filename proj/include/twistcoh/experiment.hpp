#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twistcoh/gamma_series.hpp"
#include "twistcoh/halfline.hpp"
#include "twistcoh/model_reps.hpp"

namespace twistcoh {

enum class Suite {
  MellinIdentities,
  Solve,
  EstimateSweep,
  ObstructionScan,
  Cocycle,
  PerturbationSweep,
};

std::string_view to_string(Suite s);
/// Throws ConfigError for unknown names.
Suite parse_suite(std::string_view name);

struct GridSpec {
  long long n_points = 4096;
  double x_min = -8.0;
  double x_max = 56.0;

  LogGrid make() const;
  /// "N,XMIN,XMAX"; throws ConfigError.
  static GridSpec parse(std::string_view text);
};

struct Tolerances {
  double decay = kDefaultDecayTol;
  double obstruction = 1e-9;  ///< relative to max|g|
  double eps_pole = 0.05;
  double parseval = 1e-8;
  double derivative = 1e-6;
  double roundtrip = 1e-8;
  double solve = 1e-6;
  double functional = 1e-7;   ///< |D| errors and invariance
  double projected = 1e-8;    ///< |D| of projected inputs
  double base_bound = 1e-8;
  double estimate_constant = 10.0;
  double growth = 0.2;        ///< minimum growth per extension for obstructed inputs
  double stability = 0.01;    ///< maximum drift per extension for projected inputs
};

struct CocycleSettings {
  double v = 1.0;
  double m1 = 0.0;
  double lambda = 1.0;  ///< [u, v] = lambda v for the Cartan reduction
  double phi_x = 0.5;
};

struct PerturbSettings {
  double delta = 0.2;
  int steps = 5;
};

struct ExperimentConfig {
  GridSpec grid;
  ModelRepParams params;
  double s = 1.0;
  std::vector<double> t_grid{0.0, 0.5, 1.0, 2.0};
  std::vector<double> mellin_lines{0.0, -0.5, -0.25};
  std::vector<double> solve_lines{0.0, -0.5, -0.25};
  /// x_max values for the grid-extension check of the obstruction scan; empty skips it.
  std::vector<double> extensions;
  std::vector<NamedSeries> functions;
  std::optional<GammaSeries> bump;
  Suite suite = Suite::MellinIdentities;
  Tolerances tol;
  CocycleSettings cocycle;
  PerturbSettings perturb;
  std::filesystem::path out_dir = ".";
  std::string prefix = "report";
  unsigned threads = 0;
  bool strict = false;
};

/// Flat "key = value" text, '#' starts a comment. Unknown keys, malformed values and
/// violated invariants throw ConfigError naming the key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

struct ReportRow {
  std::string suite;
  std::string case_id;
  std::vector<std::pair<std::string, std::string>> params;
  std::string quantity;
  double measured = 0.0;
  std::string relation = "<=";  ///< pass iff measured <relation> bound
  double bound = 0.0;
  bool pass = false;
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, double>> details;
};

/// Sets row.pass from measured, relation and bound; strict turns flagged rows into failures.
void grade(ReportRow& row, bool strict);

struct LineProfilePoint {
  std::string case_id;
  double a = 0.0;
  double norm_sq = 0.0;
};

struct WeightedNormPoint {
  std::string case_id;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct SuiteResult {
  std::vector<ReportRow> rows;
  std::vector<LineProfilePoint> line_profiles;
  std::vector<WeightedNormPoint> weighted_norms;

  bool all_pass() const;
};

struct PerturbationSummary {
  std::size_t points = 0;
  double base_ratio_min = 0.0;
  double base_ratio_max = 0.0;
  double constant_min = 0.0;
  double constant_max = 0.0;
};

/// Reruns the solve over (lambda1 + dl, m + dm) with dl, dm on a steps x steps grid in
/// [-delta/2, delta/2], so |dl| + |dm| <= delta. Throws ConfigError unless delta < m/2.
SuiteResult perturbation_sweep(const ExperimentConfig& cfg,
                               PerturbationSummary* summary = nullptr);

/// Runs cfg.suite. Module errors become failed rows.
SuiteResult run_suite(const ExperimentConfig& cfg);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_json(const std::vector<ReportRow>& rows);
std::string line_profiles_csv(const std::vector<LineProfilePoint>& points);
std::string weighted_norms_csv(const std::vector<WeightedNormPoint>& points);

struct RunOverrides {
  std::optional<Suite> suite;
  std::optional<std::filesystem::path> out_dir;
  std::optional<GridSpec> grid;
  bool strict = false;
};

struct RunOutcome {
  SuiteResult result;
  std::vector<std::filesystem::path> files;
  int exit_code = 0;
};

/// Loads, overrides, validates, runs and writes <prefix>_<suite>.csv/.json plus plot data.
/// ConfigError propagates; the CLI maps it to exit code 2.
RunOutcome run(const std::filesystem::path& config_path, const RunOverrides& overrides = {});

}  // namespace twistcoh
