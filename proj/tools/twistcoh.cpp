#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "twistcoh/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Twisted cohomological equations on model representations"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the suite selected by a config file");
  std::string config;
  std::string suite;
  std::string out_dir;
  std::string grid;
  bool strict = false;
  run->add_option("config", config, "key = value config file")->required();
  run->add_option("--suite", suite, "override the suite selector");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--grid", grid, "grid override N,XMIN,XMAX");
  run->add_flag("--strict", strict, "flagged rows count as failures");

  CLI11_PARSE(app, argc, argv);

  try {
    twistcoh::RunOverrides ov;
    if (!suite.empty()) ov.suite = twistcoh::parse_suite(suite);
    if (!out_dir.empty()) ov.out_dir = out_dir;
    if (!grid.empty()) ov.grid = twistcoh::GridSpec::parse(grid);
    ov.strict = strict;
    const auto outcome = twistcoh::run(config, ov);
    std::size_t failed = 0;
    for (const auto& row : outcome.result.rows) {
      if (row.pass) continue;
      ++failed;
      std::fprintf(stderr, "FAIL %s %s %s = %.6g (%s %.3g)\n", row.suite.c_str(),
                   row.case_id.c_str(), row.quantity.c_str(), row.measured, row.relation.c_str(),
                   row.bound);
    }
    std::printf("%zu rows, %zu failed\n", outcome.result.rows.size(), failed);
    for (const auto& f : outcome.files) std::printf("wrote %s\n", f.string().c_str());
    return outcome.exit_code;
  } catch (const twistcoh::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
