#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdph/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace hdph;

namespace {

// CSV without its runtime_ms column: the reproducibility contract covers
// every value except wall-clock timings.
std::string strip_runtime_column(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t cut = line.rfind(',');
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

const PerDAggregate& aggregate_for(const ExperimentReport& rep, Index d) {
  for (const PerDAggregate& a : rep.per_d)
    if (a.d == d) return a;
  FAIL("missing per-d aggregate");
  return rep.per_d.front();
}

ExperimentConfig tiny_curse_config() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::curse;
  cfg.n = 8;
  cfg.s = 2;
  cfg.nu = 0.01;
  cfg.shape = Shape::circle;
  cfg.d_grid = {50, 200};
  cfg.degrees = {0, 1};
  cfg.reps = 4;
  cfg.seed = 11;
  cfg.filtration = Filtration::rips;
  cfg.out = "/tmp/hdph_test_curse";
  return cfg;
}

}  // namespace

TEST_CASE("config text parses keys, comments, and blank lines") {
  const std::string text =
      "# experiment layout\n"
      "experiment = mitigation\n"
      "\n"
      "n = 12\n"
      "s=3\n"
      "nu = 0.5\n"
      "shape = uniform_square\n"
      "d_grid = 10, 100, 1000\n"
      "degrees = 0,1\n"
      "reps = 5\n"
      "seed = 99\n"
      "filtration = rips\n"
      "out = run/report\n"
      "format = csv\n"
      "max-simplices = 5e5\n";
  const ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.experiment == ExperimentKind::mitigation);
  CHECK(cfg.n == 12);
  CHECK(cfg.s == 3);
  CHECK(cfg.nu == 0.5);
  CHECK(cfg.shape == Shape::uniform_square);
  REQUIRE(cfg.d_grid.size() == 3);
  CHECK(cfg.d_grid[2] == 1000);
  REQUIRE(cfg.degrees.size() == 2);
  CHECK(cfg.reps == 5);
  CHECK(cfg.seed == 99);
  CHECK(cfg.out == "run/report");
  CHECK(cfg.format == ReportFormat::csv);
  CHECK(cfg.max_simplices == 5e5);

  // Untouched keys keep their defaults.
  const ExperimentConfig defaults = parse_config_text("n = 10\n");
  CHECK(defaults.experiment == ExperimentKind::curse);
  CHECK(defaults.nu == 0.01);
  CHECK(defaults.format == ReportFormat::both);
}

TEST_CASE("config entries reject unknown keys and bad values") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "n", "12x"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "nu", "abc"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "shape", "torus"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "experiment", "nope"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_entry(cfg, "format", "xml"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("just a line\n"), std::invalid_argument);

  apply_config_entry(cfg, "d-grid", "16,32");  // flag-style alias
  REQUIRE(cfg.d_grid.size() == 2);
  CHECK(cfg.d_grid[0] == 16);
}

TEST_CASE("config files load from disk") {
  const std::string path = "/tmp/hdph_test_config.ini";
  {
    std::ofstream f(path, std::ios::trunc);
    f << "n = 14\nseed = 3\n";
  }
  const ExperimentConfig cfg = load_config_file(path);
  CHECK(cfg.n == 14);
  CHECK(cfg.seed == 3);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config_file("/tmp/hdph_no_such_file.ini"), std::invalid_argument);
}

TEST_CASE("config validation rejects out-of-contract values") {
  CHECK_NOTHROW(validate_config(ExperimentConfig{}));

  auto broken = [](const char* key, const char* value) {
    ExperimentConfig cfg;
    apply_config_entry(cfg, key, value);
    return cfg;
  };
  CHECK_THROWS_AS(validate_config(broken("n", "1")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("d_grid", "100,100")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("reps", "0")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("s", "0")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("s", "40")), std::invalid_argument);   // s > n - 1
  CHECK_THROWS_AS(validate_config(broken("s", "1")), std::invalid_argument);    // circle needs 2
  CHECK_THROWS_AS(validate_config(broken("nu", "0")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("degrees", "1,1")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("degrees", "39")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("max_simplices", "0")), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(broken("out", "")), std::invalid_argument);

  // Cloud-shape constraints only bind the experiments that build clouds.
  ExperimentConfig eig;
  eig.experiment = ExperimentKind::eigengap;
  eig.s = 0;
  eig.degrees.clear();
  CHECK_NOTHROW(validate_config(eig));
}

TEST_CASE("oversized complexes trip the resource guard before any work") {
  ExperimentConfig cfg = tiny_curse_config();
  cfg.max_simplices = 50;  // predicted count for n=8, degrees up to 1 is 8+28+56 = 92
  try {
    run_curse(cfg);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("predicted simplex count") != std::string::npos);
    CHECK(msg.find("max_simplices") != std::string::npos);
  }
}

TEST_CASE("trend labels classify median series") {
  CHECK(trend_label({1.0, 2.0, 3.0}) == "growing");
  CHECK(trend_label({3.0, 2.0, 1.0}) == "shrinking");
  CHECK(trend_label({2.0, 2.0, 2.0}) == "bounded");
  CHECK(trend_label({1.0, 1.1, 1.05}) == "bounded");  // spread within 25%
  CHECK(trend_label({1.0, 3.0, 2.0}) == "mixed");
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(trend_label({1.0, inf, 2.0}) == "mixed");
  CHECK(trend_label({5.0}) == "bounded");
}

TEST_CASE("series keys are stable identifiers") {
  CHECK(series_key("d_B", "P_vs_Pobs", 0) == "d_B|P_vs_Pobs|deg0");
  CHECK(series_key("mean_min_gap", "wishart", -1) == "mean_min_gap|wishart|deg-1");
}

TEST_CASE("random diagrams respect their size contract") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const PersistenceDiagram D = random_diagram(rng, 5, true);
    long long expanded = 0;
    for (std::size_t i = 0; i < D.points.size(); ++i) {
      const auto& p = D.points[i];
      expanded += p.multiplicity;
      CHECK(p.birth >= 0.0);
      CHECK(p.birth <= 2.0);
      CHECK(p.death >= p.birth + 0.05 - 1e-12);
      if (i > 0) CHECK(D.points[i - 1].birth <= p.birth);
    }
    CHECK(expanded <= 5);
  }
  Rng a(9), b(9);
  const PersistenceDiagram x = random_diagram(a, 4, true);
  const PersistenceDiagram y = random_diagram(b, 4, true);
  REQUIRE(x.points.size() == y.points.size());
  for (std::size_t i = 0; i < x.points.size(); ++i) {
    CHECK(x.points[i].birth == y.points[i].birth);
    CHECK(x.points[i].death == y.points[i].death);
  }
}

TEST_CASE("metric records serialize to csv rows") {
  std::vector<MetricRecord> recs;
  recs.push_back(MetricRecord{"curse", 100, 42, 0, "d_B", "P_vs_Pobs", false, 0.5, 1.25});
  recs.push_back(MetricRecord{"curse", 100, 42, 1, "d_H", "P_vs_Pobs", true, 0.0, 2.0});
  const std::string csv = records_to_csv(recs);
  CHECK(csv ==
        "experiment,d,seed,degree,metric,target_pair,value,runtime_ms\n"
        "curse,100,42,0,d_B,P_vs_Pobs,0.5,1.25\n"
        "curse,100,42,1,d_H,P_vs_Pobs,inf,2\n");
}

TEST_CASE("config hashes are stable and sensitive") {
  const ExperimentConfig a;
  ExperimentConfig b;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 8);
  b.seed = 43;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("empty reports emit a bare csv header and valid json") {
  ExperimentReport rep;
  rep.config.out = "/tmp/hdph_test_empty";
  const std::vector<std::string> paths = emit_report(rep, ReportFormat::both);
  REQUIRE(paths.size() == 2);
  std::ifstream csv(paths[0]);
  std::stringstream cbuf;
  cbuf << csv.rdbuf();
  CHECK(cbuf.str() == "experiment,d,seed,degree,metric,target_pair,value,runtime_ms\n");
  std::ifstream js(paths[1]);
  const nlohmann::json j = nlohmann::json::parse(js);
  CHECK(j["config"]["experiment"] == "curse");
  CHECK(j["per_d"].is_array());
  CHECK(j["oracle_results"].is_array());
  for (const std::string& p : paths) std::remove(p.c_str());
}

TEST_CASE("a small curse run produces the advertised record grid") {
  const ExperimentConfig cfg = tiny_curse_config();
  const ExperimentReport rep = run_curse(cfg);

  // Per (d, rep): one run-level timing row + 5 rows per degree.
  const std::size_t expected = cfg.d_grid.size() * static_cast<std::size_t>(cfg.reps) *
                               (1 + 5 * cfg.degrees.size());
  CHECK(rep.records.size() == expected);

  for (const MetricRecord& r : rep.records) {
    CHECK(r.experiment == "curse");
    CHECK((r.d == 50 || r.d == 200));
    CHECK(r.seed >= cfg.seed);
    CHECK(r.seed < cfg.seed + static_cast<std::uint64_t>(cfg.reps));
  }

  // Aggregates exist for both d values and carry the derived series.
  REQUIRE(rep.per_d.size() == 2);
  const PerDAggregate& agg = aggregate_for(rep, 200);
  CHECK(agg.medians.count("d_B|P_vs_Pobs|deg0") == 1);
  CHECK(agg.medians.count("d_B_over_sqrt_d|P_vs_Pobs|deg0") == 1);
  CHECK(agg.medians.count("d_B_minus_pred|P_vs_Pobs|deg0") == 1);
  CHECK(agg.medians.count("max_rel_pers|Pobs|deg1") == 1);
  CHECK(agg.medians.count("diagrams_ms|P_vs_Pobs|deg-1") == 0);  // timings are not aggregated
  CHECK(rep.trend_labels.count("d_B|P_vs_Pobs|deg0") == 1);

  // The degree-0 bottleneck grows with d at this scale.
  const double lo = aggregate_for(rep, 50).medians.at("d_B|P_vs_Pobs|deg0");
  const double hi = agg.medians.at("d_B|P_vs_Pobs|deg0");
  CHECK(lo > 0);
  CHECK(hi > lo);

  // Median and IQR of the recorded values, recomputed directly.
  std::vector<double> vals;
  for (const MetricRecord& r : rep.records)
    if (r.d == 200 && r.metric == "d_B" && r.degree == 0) vals.push_back(r.value);
  REQUIRE(vals.size() == 4);
  std::sort(vals.begin(), vals.end());
  CHECK(agg.medians.at("d_B|P_vs_Pobs|deg0") == 0.5 * (vals[1] + vals[2]));
  CHECK(agg.iqr.at("d_B|P_vs_Pobs|deg0") == vals[2] - vals[0]);
}

TEST_CASE("identical configs reproduce byte-identical outputs modulo timings") {
  const ExperimentConfig cfg = tiny_curse_config();
  const ExperimentReport a = run_curse(cfg);
  const ExperimentReport b = run_curse(cfg);
  CHECK(strip_runtime_column(records_to_csv(a.records)) ==
        strip_runtime_column(records_to_csv(b.records)));
  CHECK(report_to_json(a) == report_to_json(b));  // aggregates exclude wall clock entirely
}

TEST_CASE("cech curse runs stay within the small-n guard") {
  ExperimentConfig cfg = tiny_curse_config();
  cfg.filtration = Filtration::cech;
  cfg.n = 6;
  cfg.shape = Shape::uniform_square;
  cfg.d_grid = {20, 80};
  cfg.reps = 2;
  const ExperimentReport rep = run_curse(cfg);
  CHECK(rep.per_d.size() == 2);
  CHECK(aggregate_for(rep, 80).medians.at("d_B|P_vs_Pobs|deg0") >
        aggregate_for(rep, 20).medians.at("d_B|P_vs_Pobs|deg0"));

  cfg.n = 13;
  CHECK_THROWS_AS(run_curse(cfg), std::invalid_argument);
}

TEST_CASE("mitigation runs record compressed-cloud comparisons") {
  ExperimentConfig cfg = tiny_curse_config();
  cfg.experiment = ExperimentKind::mitigation;
  cfg.d_grid = {30, 120};
  cfg.reps = 2;
  const ExperimentReport rep = run_mitigation(cfg);

  const PerDAggregate& agg = aggregate_for(rep, 120);
  for (const char* pair : {"P_vs_Phat", "P_vs_Pobs", "Phat_vs_Ehat"}) {
    CHECK(agg.medians.count(series_key("d_B", pair, 0)) == 1);
    CHECK(agg.medians.count(series_key("d_H", pair, 1)) == 1);
  }
  CHECK(agg.medians.count("max_pers|Ehat|deg0") == 1);
  CHECK(agg.medians.count("dk_bound|Pobs_vs_E|deg-1") == 1);
  CHECK(agg.medians.count("dk_max_closeness|Pobs_vs_E|deg-1") == 1);

  REQUIRE(rep.oracle_results.size() == 1);
  CHECK(rep.oracle_results[0].name == "davis_kahan");
  CHECK(rep.oracle_results[0].pass);

  ExperimentConfig bad = cfg;
  bad.filtration = Filtration::cech;
  CHECK_THROWS_AS(run_mitigation(bad), std::invalid_argument);
}

TEST_CASE("eigengap runs label their trend and skip short fits") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::eigengap;
  cfg.n = 6;
  cfg.d_grid = {8, 32};
  cfg.reps = 60;
  cfg.seed = 4;
  cfg.out = "/tmp/hdph_test_eigengap";
  const ExperimentReport rep = run_experiment(cfg);

  REQUIRE(rep.per_d.size() == 2);
  CHECK(aggregate_for(rep, 32).medians.at("mean_min_gap|wishart|deg-1") >
        aggregate_for(rep, 8).medians.at("mean_min_gap|wishart|deg-1"));
  CHECK(rep.trend_labels.at("mean_min_gap|wishart|deg-1") == "growing");

  bool saw_increasing = false, saw_fit_skip = false;
  for (const OracleResult& o : rep.oracle_results) {
    if (o.name == "eigengap_increasing") {
      saw_increasing = true;
      CHECK(o.pass);
    }
    if (o.name == "sqrt_fit") {
      saw_fit_skip = true;
      CHECK(o.pass);
      CHECK(o.details.find("skipped") != std::string::npos);
    }
  }
  CHECK(saw_increasing);
  CHECK(saw_fit_skip);
}

TEST_CASE("deterministic validation oracles all pass") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::simplex_check;
  cfg.out = "/tmp/hdph_test_simplex";
  const ExperimentReport rep = run_validation_suite(cfg);
  REQUIRE(rep.records.empty());
  REQUIRE(rep.oracle_results.size() == 4);
  for (const OracleResult& o : rep.oracle_results) {
    INFO(o.name, ": ", o.details);
    CHECK(o.pass);
    CHECK_FALSE(o.hard);
  }
}

TEST_CASE("statistical validation oracles pass at reduced scale") {
  ValidationOptions opts;
  opts.simplex = false;
  opts.bottleneck = false;
  opts.weingarten_samples = 20000;
  const std::vector<OracleResult> out = validation_oracles(123, opts);
  REQUIRE(out.size() == 14);  // 12 orthogonal-moment patterns + 2 distance moments
  for (const OracleResult& o : out) {
    INFO(o.name, ": ", o.details);
    CHECK(o.pass);
  }
}
