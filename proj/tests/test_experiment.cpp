#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "twistcoh/experiment.hpp"

using namespace twistcoh;

namespace {

std::string config_error_message(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
    return e.what();
  }
  FAIL("expected ConfigError for: " << text);
  return {};
}

const ReportRow* find_row(const SuiteResult& r, const std::string& case_id, const std::string& q) {
  for (const auto& row : r.rows) {
    if (row.case_id == case_id && row.quantity == q) return &row;
  }
  return nullptr;
}

double detail(const ReportRow& row, const std::string& key) {
  for (const auto& [k, v] : row.details) {
    if (k == key) return v;
  }
  FAIL("missing detail " << key);
  return 0.0;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults and keys") {
  const auto cfg = parse_config("suite = solve\ntwist.m = 1.5 # comment\nsolve.t_grid = 0, 1\n");
  CHECK(cfg.suite == Suite::Solve);
  CHECK(cfg.params.m == 1.5);
  CHECK(cfg.t_grid == std::vector<double>{0.0, 1.0});
  CHECK(cfg.functions.size() == 8);
  CHECK(cfg.grid.n_points == 4096);

  const auto inl = parse_config("functions.h = (1, 2, 1); (0.5, 3, 2)\n");
  REQUIRE(inl.functions.size() == 1);
  CHECK(inl.functions[0].name == "h");
  CHECK(inl.functions[0].series.terms().size() == 2);

  const auto both = parse_config("functions.family = closed-form\nfunctions.h = (1, 2, 1)\n");
  CHECK(both.functions.size() == 9);
}

TEST_CASE("config errors name the key") {
  CHECK(config_error_message("grid.n_points = -4\n").find("grid.n_points") != std::string::npos);
  CHECK(config_error_message("grid.nonsense = 1\n").find("grid.nonsense") != std::string::npos);
  CHECK(config_error_message("twist.m = 1\ntwist.m = 2\n").find("twist.m") != std::string::npos);
  CHECK(config_error_message("twist.m = abc\n").find("twist.m") != std::string::npos);
  CHECK(config_error_message("twist.m = 0\n").find("twist.m") != std::string::npos);
  CHECK(config_error_message("rep.lambda1 = 0\n").find("rep.lambda1") != std::string::npos);
  CHECK(config_error_message("rep.sigma = 2\n").find("rep.sigma") != std::string::npos);
  CHECK(config_error_message("suite = nope\n").find("suite") != std::string::npos);
  CHECK(config_error_message("tol.solve = -1\n").find("tol.solve") != std::string::npos);
  CHECK(config_error_message("solve.t_grid = 0, -1\n").find("solve.t_grid") != std::string::npos);
  CHECK(config_error_message("functions.family = none\n").find("functions.family") !=
        std::string::npos);
  CHECK(config_error_message("suite = perturbation-sweep\nperturb.delta = 0.6\n")
            .find("perturb.delta") != std::string::npos);
  CHECK(config_error_message("just a line\n").find("line 1") != std::string::npos);
  CHECK_THROWS_AS(GridSpec::parse("128,1"), Error);
  CHECK(GridSpec::parse("128, -4, 20").n_points == 128);
}

TEST_CASE("grade") {
  ReportRow row;
  row.measured = 0.5;
  row.bound = 1.0;
  grade(row, false);
  CHECK(row.pass);
  row.relation = ">=";
  grade(row, false);
  CHECK_FALSE(row.pass);
  row.measured = std::nan("");
  grade(row, false);
  CHECK_FALSE(row.pass);
  row = ReportRow{};
  row.measured = 0.5;
  row.bound = 1.0;
  row.flags = {"inadmissible"};
  grade(row, false);
  CHECK(row.pass);
  grade(row, true);
  CHECK_FALSE(row.pass);
}

TEST_CASE("solve suite reports the obstruction of r^2 e^{-r}") {
  auto cfg = parse_config("suite = solve\nfunctions.r2e1 = (1, 2, 1)\n");
  validate(cfg);
  const auto res = run_suite(cfg);
  CHECK(res.all_pass());
  const auto* row = find_row(res, "r2e1", "obstruction_error");
  REQUIRE(row != nullptr);
  CHECK(detail(*row, "D_re") == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-9));
  CHECK(find_row(res, "r2e1", "coincidence_defect") != nullptr);
  CHECK(res.line_profiles.size() == 3);
}

TEST_CASE("all suites pass on the default family") {
  for (const char* suite : {"mellin-identities", "solve", "obstruction-scan", "cocycle"}) {
    CAPTURE(suite);
    auto cfg = parse_config(std::string("suite = ") + suite + "\n");
    validate(cfg);
    const auto res = run_suite(cfg);
    for (const auto& r : res.rows) {
      CAPTURE(r.case_id);
      CAPTURE(r.quantity);
      CHECK(r.pass);
    }
    CHECK_FALSE(res.rows.empty());
  }
  auto est = parse_config("suite = estimate-sweep\nrep.lambda1 = -1\nsolve.s = 2\n");
  validate(est);
  CHECK(run_suite(est).all_pass());
}

TEST_CASE("module errors become failed rows") {
  auto cfg = parse_config("suite = mellin-identities\nfunctions.bad = (1, 0.5, 1)\n");
  cfg.mellin_lines = {0.0};
  cfg.functions[0].series = GammaSeries({{1.0, 1.0, -1.0}});
  const auto res = run_suite(cfg);
  REQUIRE_FALSE(res.rows.empty());
  CHECK_FALSE(res.all_pass());
  CHECK(res.rows[0].quantity.rfind("error:", 0) == 0);
}

TEST_CASE("perturbation sweep") {
  auto cfg = parse_config("suite = perturbation-sweep\nfunctions.h = (1, 2, 1)\nsolve.t_grid = 0, 0.5\n");
  validate(cfg);
  PerturbationSummary sum;
  const auto res = perturbation_sweep(cfg, &sum);
  CHECK(res.all_pass());
  CHECK(sum.points == 25);
  CHECK(sum.base_ratio_max <= 1.0 + 1e-8);

  cfg.perturb.delta = 0.0;
  PerturbationSummary zero;
  const auto single = perturbation_sweep(cfg, &zero);
  CHECK(zero.points == 1);
  auto solve_cfg = cfg;
  solve_cfg.suite = Suite::Solve;
  const auto base = run_suite(solve_cfg);
  const auto* base_row = find_row(base, "h", "base_norm_ratio");
  REQUIRE(base_row != nullptr);
  CHECK(zero.base_ratio_max == doctest::Approx(base_row->measured).epsilon(1e-12));
  CHECK(single.all_pass());

  cfg.perturb.delta = 0.6;
  CHECK_THROWS_AS(perturbation_sweep(cfg), Error);
}

TEST_CASE("report serialization") {
  ReportRow row;
  row.suite = "solve";
  row.case_id = "a,b";
  row.params = {{"m", "1"}, {"s", "2"}};
  row.quantity = "residual";
  row.measured = 0.1;
  row.bound = 1e-6;
  row.flags = {"x", "y"};
  row.details = {{"k", 0.5}};
  grade(row, false);
  const auto csv = report_csv({row});
  CHECK(csv.rfind("suite,case_id,params,quantity,measured,relation,bound,pass,flags,details\n", 0) == 0);
  CHECK(csv.find("\"a,b\"") != std::string::npos);
  CHECK(csv.find("m=1;s=2") != std::string::npos);
  CHECK(csv.find("0.10000000000000001") != std::string::npos);
  CHECK(csv.find(",false,x|y,k=0.5") != std::string::npos);
  const auto json = report_json({row});
  CHECK(json.find("\"case_id\": \"a,b\"") != std::string::npos);
  CHECK(json.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("run writes deterministic reports") {
  const auto dir = std::filesystem::temp_directory_path() / "twistcoh_test_experiment";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto cfg_path = dir / "solve.cfg";
  {
    std::ofstream os(cfg_path);
    os << "suite = solve\nrun.threads = 4\noutput.prefix = r\n";
  }
  RunOverrides ov;
  ov.out_dir = dir / "a";
  const auto a = run(cfg_path, ov);
  ov.out_dir = dir / "b";
  const auto b = run(cfg_path, ov);
  CHECK(a.exit_code == 0);
  REQUIRE(a.files.size() == b.files.size());
  CHECK(a.files.size() == 4);
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].filename() == b.files[i].filename());
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  }
  CHECK(std::filesystem::exists(dir / "a" / "r_solve.csv"));
  CHECK(std::filesystem::exists(dir / "a" / "r_solve_line_profiles.csv"));

  ov.suite = Suite::Cocycle;
  ov.grid = GridSpec{2048, -8.0, 56.0};
  CHECK(run(cfg_path, ov).exit_code == 0);
  CHECK_THROWS_AS(run(dir / "missing.cfg"), Error);
  std::filesystem::remove_all(dir);
}
