#include "hdph/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

// Exit codes: 0 success, 1 invalid config, 2 resource guard, 3 oracle hard-failure.
int main(int argc, char** argv) {
  CLI::App app{"HDLSS persistence-diagram experiments"};

  std::string config_path;
  std::string experiment, n, s, nu, d_grid, degrees, reps, seed, filtration, out, format,
      max_simplices;
  app.add_option("--config", config_path, "key=value config file (flags override it)");
  app.add_option("--experiment", experiment,
                 "curse | mitigation | simplex_check | eigengap | weingarten_check");
  app.add_option("--n", n, "points per cloud");
  app.add_option("--s", s, "essential dimension / compression target");
  app.add_option("--nu", nu, "noise variance per coordinate");
  app.add_option("--d-grid", d_grid, "comma-separated ambient dimensions");
  app.add_option("--degrees", degrees, "comma-separated homology degrees");
  app.add_option("--reps", reps, "replicates per grid cell");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--filtration", filtration, "rips | cech");
  app.add_option("--out", out, "output path prefix");
  app.add_option("--format", format, "csv | json | both");
  app.add_option("--max-simplices", max_simplices, "resource cap on predicted simplex count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit clean; bad flags are config errors
  }

  try {
    hdph::ExperimentConfig cfg;
    if (app.count("--config")) cfg = hdph::load_config_file(config_path);
    const std::pair<const char*, const std::string*> overrides[] = {
        {"experiment", &experiment}, {"n", &n},
        {"s", &s},                   {"nu", &nu},
        {"d_grid", &d_grid},         {"degrees", &degrees},
        {"reps", &reps},             {"seed", &seed},
        {"filtration", &filtration}, {"out", &out},
        {"format", &format},         {"max_simplices", &max_simplices},
    };
    for (const auto& [key, val] : overrides)
      if (!val->empty()) hdph::apply_config_entry(cfg, key, *val);

    const hdph::ExperimentReport report = hdph::run_experiment(cfg);
    for (const std::string& path : hdph::emit_report(report, cfg.format))
      std::printf("wrote %s\n", path.c_str());
    for (const auto& [series, label] : report.trend_labels)
      std::printf("trend %s: %s\n", series.c_str(), label.c_str());

    bool hard_failure = false;
    for (const hdph::OracleResult& o : report.oracle_results) {
      std::printf("oracle %s: %s (%s)\n", o.name.c_str(), o.pass ? "pass" : "FAIL",
                  o.details.c_str());
      if (!o.pass && o.hard) hard_failure = true;
    }
    if (hard_failure) {
      std::fprintf(stderr, "oracle hard-failure\n");
      return 3;
    }
    return 0;
  } catch (const hdph::ResourceError& e) {
    std::fprintf(stderr, "resource guard: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
