#pragma once

#include "hdph/diagram_metrics.hpp"
#include "hdph/pca.hpp"
#include "hdph/persistence.hpp"
#include "hdph/pointcloud.hpp"
#include "hdph/randmat.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hdph {

enum class ExperimentKind { curse, mitigation, simplex_check, eigengap, weingarten_check };
enum class ReportFormat { csv, json, both };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::curse;
  Index n = 40;
  Index s = 2;
  double nu = 0.01;
  Shape shape = Shape::circle;
  std::vector<Index> d_grid{100, 1000, 10000};
  std::vector<int> degrees{0, 1};
  Index reps = 20;
  std::uint64_t seed = 42;
  Filtration filtration = Filtration::rips;
  std::string out = "report";
  ReportFormat format = ReportFormat::both;
  double max_simplices = 2e6;
};

ExperimentKind parse_experiment_kind(const std::string& name);
Shape parse_shape(const std::string& name);
Filtration parse_filtration(const std::string& name);
ReportFormat parse_report_format(const std::string& name);
std::string experiment_name(ExperimentKind k);
std::string shape_name(Shape s);
std::string filtration_name(Filtration f);
std::string format_name(ReportFormat f);

// One "key = value" assignment (INI line or CLI flag); unknown keys throw.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Flat key=value text, '#' comment lines, blank lines ignored; starts from defaults.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// One measured value, traceable to its (d, seed) run.
struct MetricRecord {
  std::string experiment;
  Index d = 0;
  std::uint64_t seed = 0;
  int degree = 0;  // homology degree; -1 for run-level records
  std::string metric;
  std::string target_pair;
  bool is_inf = false;
  double value = 0;
  double runtime_ms = 0;
};

struct OracleResult {
  std::string name;
  bool pass = true;
  bool hard = false;  // deterministic oracle, or a statistical one beyond 6 sigma
  double deviation = 0;
  std::string details;
};

// Per-d aggregate; series keys are "<metric>|<target_pair>|deg<degree>".
// Infinite medians are stored as +infinity and serialized as "inf".
struct PerDAggregate {
  Index d = 0;
  std::map<std::string, double> medians;
  std::map<std::string, double> iqr;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<MetricRecord> records;
  std::vector<PerDAggregate> per_d;
  std::map<std::string, std::string> trend_labels;
  std::vector<OracleResult> oracle_results;
};

std::string series_key(const std::string& metric, const std::string& target_pair, int degree);

// Descriptive label from per-d medians: "growing" (strictly increasing),
// "shrinking" (strictly decreasing), "bounded" (relative spread <= 25%),
// else "mixed".
std::string trend_label(const std::vector<double>& medians);

// Random diagram with <= max_points distinct points (expanded size <= 5 when
// multiplicities are allowed), persistences bounded away from zero.
PersistenceDiagram random_diagram(Rng& rng, int max_points, bool allow_multiplicity);

ExperimentReport run_curse(const ExperimentConfig& cfg);
ExperimentReport run_mitigation(const ExperimentConfig& cfg);
ExperimentReport run_eigengap(const ExperimentConfig& cfg);

struct ValidationOptions {
  bool simplex = true;
  bool bottleneck = true;
  bool weingarten = true;
  bool moments = true;
  Index bottleneck_pairs = 500;
  Index weingarten_samples = 100000;
  Index moment_n = 10;
  Index moment_s = 3;
  Index moment_d = 2000;
  Index moment_reps = 2000;
};

std::vector<OracleResult> validation_oracles(std::uint64_t seed, const ValidationOptions& opts);
// simplex_check runs the deterministic oracles (simplex diagrams, bottleneck
// brute force, domination); weingarten_check runs the statistical ones.
ExperimentReport run_validation_suite(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// "experiment,d,seed,degree,metric,target_pair,value,runtime_ms"; infinite
// values print as "inf".
std::string records_to_csv(const std::vector<MetricRecord>& records);
std::string report_to_json(const ExperimentReport& report);
// 8 hex chars over the canonical config serialization; part of output names.
std::string config_hash(const ExperimentConfig& cfg);
// Writes "<out>-<hash>.csv" / ".json" (or both); returns the paths written.
std::vector<std::string> emit_report(const ExperimentReport& report, ReportFormat format);

}  // namespace hdph
