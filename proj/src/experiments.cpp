#include "hdph/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hdph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

long long parse_int(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + what + ": '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || v.find('-') != std::string::npos)
      throw std::invalid_argument("trailing characters");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad unsigned integer for " + what + ": '" + v + "'");
  }
}

double parse_real(const std::string& v, const std::string& what) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + what + ": '" + v + "'");
  }
}

std::vector<Index> parse_index_list(const std::string& v, const std::string& what) {
  std::vector<Index> out;
  for (const std::string& tok : split_commas(v))
    out.push_back(static_cast<Index>(parse_int(tok, what)));
  return out;
}

nlohmann::json json_finite_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return nlohmann::json(v);
}

double median_of_sorted(const std::vector<double>& v) {
  const size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double iqr_of_sorted(const std::vector<double>& v) {
  const size_t m = v.size();
  const double q1 = v[(m - 1) / 4];
  const double q3 = v[(m - 1) * 3 / 4];
  if (std::isinf(q1) && std::isinf(q3)) return 0.0;  // whole IQR sits at infinity
  return q3 - q1;
}

// Per-d medians, IQRs, derived bottleneck statistics, and trend labels, all
// from the recorded values only.  Wall-clock rows ("diagrams_ms") are skipped
// so aggregates stay deterministic.
void finalize_report(ExperimentReport& rep) {
  std::map<Index, std::map<std::string, std::vector<double>>> by_d;
  const double nu = rep.config.nu;
  for (const MetricRecord& r : rep.records) {
    if (r.metric == "diagrams_ms") continue;
    const double v = r.is_inf ? kInf : r.value;
    by_d[r.d][series_key(r.metric, r.target_pair, r.degree)].push_back(v);
    if (r.metric == "d_B") {
      const double dd = static_cast<double>(r.d);
      by_d[r.d][series_key("d_B_over_sqrt_d", r.target_pair, r.degree)].push_back(
          r.is_inf ? kInf : r.value / std::sqrt(dd));
      by_d[r.d][series_key("d_B_minus_pred", r.target_pair, r.degree)].push_back(
          r.is_inf ? kInf : r.value - std::sqrt(2.0 * nu * dd) / 4.0);
    }
  }
  std::map<std::string, std::vector<double>> medians_by_series;
  for (auto& [d, series] : by_d) {
    PerDAggregate agg;
    agg.d = d;
    for (auto& [key, vals] : series) {
      std::sort(vals.begin(), vals.end());
      agg.medians[key] = median_of_sorted(vals);
      agg.iqr[key] = iqr_of_sorted(vals);
      medians_by_series[key].push_back(agg.medians[key]);
    }
    rep.per_d.push_back(std::move(agg));
  }
  for (auto& [key, meds] : medians_by_series) rep.trend_labels[key] = trend_label(meds);
}

std::vector<PersistenceDiagram> diagrams_of(const PointCloud& C, int max_deg, Filtration f) {
  if (f == Filtration::rips) return compute_diagrams(rips_complex(pairwise_distances(C), max_deg));
  return compute_diagrams(cech_complex(C, max_deg));
}

void guard_simplex_budget(const ExperimentConfig& cfg, int max_deg) {
  const double predicted = predicted_simplex_count(cfg.n, max_deg);
  if (predicted > cfg.max_simplices)
    throw ResourceError("predicted simplex count " + format_double(predicted) +
                        " exceeds max_simplices " + format_double(cfg.max_simplices));
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = experiment_name(c.experiment);
  j["n"] = static_cast<long long>(c.n);
  j["s"] = static_cast<long long>(c.s);
  j["nu"] = c.nu;
  j["shape"] = shape_name(c.shape);
  std::vector<long long> grid;
  for (Index d : c.d_grid) grid.push_back(static_cast<long long>(d));
  j["d_grid"] = grid;
  j["degrees"] = c.degrees;
  j["reps"] = static_cast<long long>(c.reps);
  j["seed"] = c.seed;
  j["filtration"] = filtration_name(c.filtration);
  j["out"] = c.out;
  j["format"] = format_name(c.format);
  j["max_simplices"] = c.max_simplices;
  return j;
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "curse") return ExperimentKind::curse;
  if (name == "mitigation") return ExperimentKind::mitigation;
  if (name == "simplex_check") return ExperimentKind::simplex_check;
  if (name == "eigengap") return ExperimentKind::eigengap;
  if (name == "weingarten_check") return ExperimentKind::weingarten_check;
  throw std::invalid_argument("config: unknown experiment '" + name + "'");
}

Shape parse_shape(const std::string& name) {
  if (name == "circle") return Shape::circle;
  if (name == "uniform_square") return Shape::uniform_square;
  throw std::invalid_argument("config: shape must be circle or uniform_square, got '" + name + "'");
}

Filtration parse_filtration(const std::string& name) {
  if (name == "rips") return Filtration::rips;
  if (name == "cech") return Filtration::cech;
  throw std::invalid_argument("config: filtration must be rips or cech, got '" + name + "'");
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "both") return ReportFormat::both;
  throw std::invalid_argument("config: format must be csv, json, or both, got '" + name + "'");
}

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::curse: return "curse";
    case ExperimentKind::mitigation: return "mitigation";
    case ExperimentKind::simplex_check: return "simplex_check";
    case ExperimentKind::eigengap: return "eigengap";
    case ExperimentKind::weingarten_check: return "weingarten_check";
  }
  return "unknown";
}

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::circle: return "circle";
    case Shape::uniform_square: return "uniform_square";
    case Shape::custom_points: return "custom_points";
  }
  return "unknown";
}

std::string filtration_name(Filtration f) { return f == Filtration::rips ? "rips" : "cech"; }

std::string format_name(ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::both: return "both";
  }
  return "unknown";
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    cfg.experiment = parse_experiment_kind(value);
  } else if (key == "n") {
    cfg.n = static_cast<Index>(parse_int(value, key));
  } else if (key == "s") {
    cfg.s = static_cast<Index>(parse_int(value, key));
  } else if (key == "nu") {
    cfg.nu = parse_real(value, key);
  } else if (key == "shape") {
    cfg.shape = parse_shape(value);
  } else if (key == "d_grid" || key == "d-grid") {
    cfg.d_grid = parse_index_list(value, key);
  } else if (key == "degrees") {
    cfg.degrees.clear();
    for (const std::string& tok : split_commas(value))
      cfg.degrees.push_back(static_cast<int>(parse_int(tok, key)));
  } else if (key == "reps") {
    cfg.reps = static_cast<Index>(parse_int(value, key));
  } else if (key == "seed") {
    cfg.seed = parse_u64(value, key);
  } else if (key == "filtration") {
    cfg.filtration = parse_filtration(value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    cfg.format = parse_report_format(value);
  } else if (key == "max_simplices" || key == "max-simplices") {
    cfg.max_simplices = parse_real(value, key);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key=value, got '" + t + "'");
    apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (cfg.d_grid.empty()) throw std::invalid_argument("config: d_grid must be nonempty");
  for (size_t i = 0; i < cfg.d_grid.size(); ++i) {
    if (cfg.d_grid[i] < 1) throw std::invalid_argument("config: d values must be >= 1");
    if (i > 0 && cfg.d_grid[i] <= cfg.d_grid[i - 1])
      throw std::invalid_argument("config: d_grid must be strictly increasing");
  }
  if (cfg.reps < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (!(cfg.max_simplices >= 1)) throw std::invalid_argument("config: max_simplices must be >= 1");
  if (cfg.out.empty()) throw std::invalid_argument("config: out must be nonempty");

  const bool builds_clouds = cfg.experiment == ExperimentKind::curse ||
                             cfg.experiment == ExperimentKind::mitigation;
  if (!builds_clouds) return;
  if (cfg.shape == Shape::custom_points)
    throw std::invalid_argument("config: shape must be circle or uniform_square");
  if (cfg.s < 1 || cfg.s > cfg.n - 1) throw std::invalid_argument("config: s must be in [1, n-1]");
  if (cfg.shape == Shape::circle && cfg.s < 2)
    throw std::invalid_argument("config: circle shape needs s >= 2");
  if (!(cfg.nu > 0)) throw std::invalid_argument("config: nu must be > 0");
  if (cfg.degrees.empty()) throw std::invalid_argument("config: degrees must be nonempty");
  for (size_t i = 0; i < cfg.degrees.size(); ++i) {
    if (cfg.degrees[i] < 0) throw std::invalid_argument("config: degrees must be >= 0");
    if (cfg.degrees[i] > static_cast<int>(cfg.n) - 2)
      throw std::invalid_argument("config: degree N requires n >= N + 2");
    if (i > 0 && cfg.degrees[i] <= cfg.degrees[i - 1])
      throw std::invalid_argument("config: degrees must be strictly increasing");
  }
}

std::string series_key(const std::string& metric, const std::string& target_pair, int degree) {
  return metric + "|" + target_pair + "|deg" + std::to_string(degree);
}

std::string trend_label(const std::vector<double>& medians) {
  if (medians.size() < 2) return "bounded";
  bool inc = true, dec = true;
  for (size_t i = 1; i < medians.size(); ++i) {
    if (!(medians[i] > medians[i - 1])) inc = false;
    if (!(medians[i] < medians[i - 1])) dec = false;
  }
  if (inc) return "growing";
  if (dec) return "shrinking";
  const double mn = *std::min_element(medians.begin(), medians.end());
  const double mx = *std::max_element(medians.begin(), medians.end());
  if (mx == mn) return "bounded";
  if (std::isinf(mx) || std::isinf(mn)) return "mixed";
  const double scale = std::max(std::abs(mn), std::abs(mx));
  return mx - mn <= 0.25 * scale ? "bounded" : "mixed";
}

PersistenceDiagram random_diagram(Rng& rng, int max_points, bool allow_multiplicity) {
  PersistenceDiagram D;
  D.degree = 0;
  int k = static_cast<int>(rng.uniform() * (max_points + 1));
  if (k > max_points) k = max_points;
  for (int i = 0; i < k; ++i) {
    DiagramPoint p;
    p.birth = 2.0 * rng.uniform();
    p.death = p.birth + 0.05 + 1.95 * rng.uniform();  // persistence bounded away from 0
    D.points.push_back(p);
  }
  if (allow_multiplicity && k >= 2 && rng.uniform() < 0.3) {
    D.points.pop_back();
    D.points.back().multiplicity = 2;
  }
  std::sort(D.points.begin(), D.points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
    return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
  });
  return D;
}

ExperimentReport run_curse(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.filtration == Filtration::cech && cfg.n > 12)
    throw std::invalid_argument("curse: cech filtration limited to n <= 12");
  const int max_deg = cfg.degrees.back();
  guard_simplex_budget(cfg, max_deg);

  ExperimentReport rep;
  rep.config = cfg;
  const std::string ename = experiment_name(cfg.experiment);
  auto add = [&rep, &ename](Index d, std::uint64_t run_seed, int degree, const std::string& metric,
                            const std::string& pair, bool is_inf, double value, double ms) {
    rep.records.push_back(
        MetricRecord{ename, d, run_seed, degree, metric, pair, is_inf, is_inf ? 0.0 : value, ms});
  };

  for (size_t di = 0; di < cfg.d_grid.size(); ++di) {
    const Index d = cfg.d_grid[di];
    for (Index r = 0; r < cfg.reps; ++r) {
      const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(r);
      Rng prng(run_seed, 2 * static_cast<std::uint64_t>(di));
      const PointCloud P = gen_original(cfg.shape, cfg.n, cfg.s, d, prng.next_u64());
      Rng erng(run_seed, 2 * static_cast<std::uint64_t>(di) + 1);
      const PointCloud E = gen_noise(cfg.n, d, cfg.nu, erng);
      const PointCloud Pobs = observe(P, E);

      Timer tdiag;
      const auto DP = diagrams_of(P, max_deg, cfg.filtration);
      const auto DO = diagrams_of(Pobs, max_deg, cfg.filtration);
      // Wall clock lives in runtime_ms only, keeping the value column reproducible.
      add(d, run_seed, -1, "diagrams_ms", "P_vs_Pobs", false, 0.0, tdiag.ms());

      for (int N : cfg.degrees) {
        {
          Timer t;
          const DiagramDistanceResult v = bottleneck_distance(DP[N], DO[N]);
          add(d, run_seed, N, "d_B", "P_vs_Pobs", v.is_inf, v.value, t.ms());
        }
        {
          Timer t;
          const DiagramDistanceResult v = hausdorff_distance(DP[N], DO[N], false);
          add(d, run_seed, N, "d_H", "P_vs_Pobs", v.is_inf, v.value, t.ms());
        }
        {
          Timer t;
          add(d, run_seed, N, "max_pers", "P", false, max_persistence(DP[N]), t.ms());
        }
        {
          Timer t;
          add(d, run_seed, N, "max_pers", "Pobs", false, max_persistence(DO[N]), t.ms());
        }
        {
          Timer t;
          add(d, run_seed, N, "max_rel_pers", "Pobs", false, max_relative_persistence(DO[N]),
              t.ms());
        }
      }
    }
  }
  finalize_report(rep);
  return rep;
}

ExperimentReport run_mitigation(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.filtration != Filtration::rips)
    throw std::invalid_argument("mitigation: rips filtration only");
  const int max_deg = cfg.degrees.back();
  guard_simplex_budget(cfg, max_deg);

  ExperimentReport rep;
  rep.config = cfg;
  const std::string ename = experiment_name(cfg.experiment);
  auto add = [&rep, &ename](Index d, std::uint64_t run_seed, int degree, const std::string& metric,
                            const std::string& pair, bool is_inf, double value, double ms) {
    rep.records.push_back(
        MetricRecord{ename, d, run_seed, degree, metric, pair, is_inf, is_inf ? 0.0 : value, ms});
  };

  long long dk_checks = 0, dk_violations = 0;
  double dk_worst = -kInf;
  for (size_t di = 0; di < cfg.d_grid.size(); ++di) {
    const Index d = cfg.d_grid[di];
    for (Index r = 0; r < cfg.reps; ++r) {
      const std::uint64_t run_seed = cfg.seed + static_cast<std::uint64_t>(r);
      Rng prng(run_seed, 2 * static_cast<std::uint64_t>(di));
      const PointCloud P = gen_original(cfg.shape, cfg.n, cfg.s, d, prng.next_u64());
      Rng erng(run_seed, 2 * static_cast<std::uint64_t>(di) + 1);
      const PointCloud E = gen_noise(cfg.n, d, cfg.nu, erng);
      const PointCloud Pobs = observe(P, E);
      const PointCloud Phat = compress(Pobs, cfg.s, true, CloudSource::observed).as_cloud();
      const PointCloud Ehat = compress(E, cfg.s, true, CloudSource::noise).as_cloud();

      Timer tdiag;
      const auto DP = diagrams_of(P, max_deg, cfg.filtration);
      const auto DO = diagrams_of(Pobs, max_deg, cfg.filtration);
      const auto DH = diagrams_of(Phat, max_deg, cfg.filtration);
      const auto DE = diagrams_of(Ehat, max_deg, cfg.filtration);
      add(d, run_seed, -1, "diagrams_ms", "all_clouds", false, 0.0, tdiag.ms());

      const struct {
        const std::vector<PersistenceDiagram>&a, &b;
        const char* pair;
      } pairs[] = {{DP, DH, "P_vs_Phat"}, {DP, DO, "P_vs_Pobs"}, {DH, DE, "Phat_vs_Ehat"}};
      for (const auto& pr : pairs) {
        for (int N : cfg.degrees) {
          {
            Timer t;
            const DiagramDistanceResult v = bottleneck_distance(pr.a[N], pr.b[N]);
            add(d, run_seed, N, "d_B", pr.pair, v.is_inf, v.value, t.ms());
          }
          {
            Timer t;
            const DiagramDistanceResult v = hausdorff_distance(pr.a[N], pr.b[N], false);
            add(d, run_seed, N, "d_H", pr.pair, v.is_inf, v.value, t.ms());
          }
        }
      }
      for (int N : cfg.degrees) {
        add(d, run_seed, N, "max_pers", "P", false, max_persistence(DP[N]), 0.0);
        add(d, run_seed, N, "max_pers", "Pobs", false, max_persistence(DO[N]), 0.0);
        add(d, run_seed, N, "max_pers", "Phat", false, max_persistence(DH[N]), 0.0);
        add(d, run_seed, N, "max_pers", "Ehat", false, max_persistence(DE[N]), 0.0);
        add(d, run_seed, N, "max_rel_pers", "Pobs", false, max_relative_persistence(DO[N]), 0.0);
        add(d, run_seed, N, "max_rel_pers", "Phat", false, max_relative_persistence(DH[N]), 0.0);
      }

      {
        Timer t;
        const EigenClosenessReport ecr = eigen_closeness_report(Pobs, E, cfg.s);
        double worst = -kInf;
        for (double c : ecr.closeness) {
          ++dk_checks;
          const double excess = c - ecr.bound;
          worst = std::max(worst, excess);
          if (excess > 1e-9) ++dk_violations;
        }
        dk_worst = std::max(dk_worst, worst);
        const double ms = t.ms();
        add(d, run_seed, -1, "dk_bound", "Pobs_vs_E", std::isinf(ecr.bound), ecr.bound, ms);
        add(d, run_seed, -1, "dk_max_closeness", "Pobs_vs_E", false,
            *std::max_element(ecr.closeness.begin(), ecr.closeness.end()), 0.0);
      }
    }
  }
  rep.oracle_results.push_back(OracleResult{
      "davis_kahan", dk_violations == 0, dk_violations != 0, dk_worst,
      "checks=" + std::to_string(dk_checks) + " violations=" + std::to_string(dk_violations)});
  finalize_report(rep);
  return rep;
}

ExperimentReport run_eigengap(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentReport rep;
  rep.config = cfg;
  const std::string ename = experiment_name(cfg.experiment);

  std::vector<double> ds, means;
  for (size_t di = 0; di < cfg.d_grid.size(); ++di) {
    Timer t;
    Rng seeder(cfg.seed, 1000 + di);
    const EigengapSeries s =
        eigengap_experiment(cfg.n, {cfg.d_grid[di]}, cfg.reps, seeder.next_u64());
    const EigengapPoint& p = s.grid.front();
    const double ms = t.ms();
    rep.records.push_back(MetricRecord{ename, p.d, cfg.seed, -1, "mean_min_gap", "wishart", false,
                                       p.mean_min_gap, ms});
    rep.records.push_back(
        MetricRecord{ename, p.d, cfg.seed, -1, "std_err", "wishart", false, p.std_err, 0.0});
    ds.push_back(static_cast<double>(p.d));
    means.push_back(p.mean_min_gap);
  }

  bool increasing = true;
  for (size_t i = 1; i < means.size(); ++i)
    if (!(means[i] > means[i - 1])) increasing = false;
  rep.oracle_results.push_back(OracleResult{"eigengap_increasing", increasing, false, 0.0,
                                            "mean min-gap strictly increasing across d grid"});
  if (ds.size() >= 4) {
    try {
      const SqrtFitParams fit = fit_sqrt_model(ds, means);
      rep.oracle_results.push_back(
          OracleResult{"sqrt_fit", true, false, fit.rss,
                       "x=" + format_double(fit.x) + " y=" + format_double(fit.y) +
                           " z=" + format_double(fit.z) + " rss=" + format_double(fit.rss)});
    } catch (const std::exception& e) {
      rep.oracle_results.push_back(
          OracleResult{"sqrt_fit", false, false, kInf, std::string("fit failed: ") + e.what()});
    }
  } else {
    rep.oracle_results.push_back(
        OracleResult{"sqrt_fit", true, false, 0.0, "skipped: needs >= 4 grid points"});
  }
  finalize_report(rep);
  return rep;
}

std::vector<OracleResult> validation_oracles(std::uint64_t seed, const ValidationOptions& opts) {
  std::vector<OracleResult> out;

  if (opts.simplex) {
    for (const Filtration filt : {Filtration::rips, Filtration::cech}) {
      const Index n_max = filt == Filtration::rips ? 7 : 6;
      int fails = 0;
      std::string detail;
      for (Index n = 3; n <= n_max; ++n) {
        const PointCloud cloud = regular_simplex_cloud(n, 1.0);
        const int max_deg = static_cast<int>(n) - 2;
        const auto diags = diagrams_of(cloud, max_deg, filt);
        for (int N = 0; N <= max_deg; ++N) {
          const PersistenceDiagram expected = analytic_simplex_diagram(filt, n, 1.0, N);
          std::string why;
          if (!diagrams_match(diags[N], expected, 1e-9, &why)) {
            ++fails;
            if (detail.size() < 400)
              detail += "n=" + std::to_string(n) + " N=" + std::to_string(N) + ": " + why + "; ";
          }
        }
      }
      out.push_back(OracleResult{
          filt == Filtration::rips ? "simplex_rips" : "simplex_cech", fails == 0, fails != 0,
          static_cast<double>(fails),
          fails ? detail : "n=3.." + std::to_string(n_max) + " all degrees match at 1e-9"});
    }
  }

  if (opts.bottleneck) {
    Rng rng(seed, 11);
    long long mismatches = 0, violations = 0;
    double max_diff = 0, worst_excess = -kInf;
    for (Index i = 0; i < opts.bottleneck_pairs; ++i) {
      const PersistenceDiagram A = random_diagram(rng, 5, true);
      const PersistenceDiagram B = random_diagram(rng, 5, true);
      const DiagramDistanceResult fast = bottleneck_distance(A, B);
      const DiagramDistanceResult slow = bottleneck_distance_bruteforce(A, B);
      const double diff = std::abs(fast.value - slow.value);
      if (diff != 0.0) ++mismatches;
      max_diff = std::max(max_diff, diff);
      const DiagramDistanceResult dh = hausdorff_distance(A, B, true);
      const double excess = dh.value - fast.value;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 0.0) ++violations;
    }
    const std::string pairs_str = std::to_string(static_cast<long long>(opts.bottleneck_pairs));
    out.push_back(OracleResult{"bottleneck_bruteforce", mismatches == 0, mismatches != 0, max_diff,
                               "pairs=" + pairs_str +
                                   " mismatches=" + std::to_string(mismatches)});
    out.push_back(OracleResult{"hausdorff_dominated", violations == 0, violations != 0,
                               worst_excess,
                               "pairs=" + pairs_str + " violations=" + std::to_string(violations)});
  }

  if (opts.weingarten) {
    const int N = 4;
    struct Pattern {
      const char* name;
      std::vector<std::pair<int, int>> entries;
      int degree;
      double exact;
    };
    const std::vector<Pattern> battery = {
        {"wg_o2_diag", {{1, 1}, {1, 1}}, 2, wg_o2(N, 1, 1, 1).to_double()},
        {"wg_o2_cross", {{1, 1}, {2, 1}}, 2, wg_o2(N, 1, 2, 1).to_double()},
        {"wg_sq_rc", {{1, 1}, {1, 1}, {1, 1}, {1, 1}}, 4, wg_o4_squares(N, 1, 1, 1, 1).to_double()},
        {"wg_sq_r", {{1, 1}, {1, 1}, {1, 2}, {1, 2}}, 4, wg_o4_squares(N, 1, 1, 1, 2).to_double()},
        {"wg_sq_c", {{1, 1}, {1, 1}, {2, 1}, {2, 1}}, 4, wg_o4_squares(N, 1, 2, 1, 1).to_double()},
        {"wg_sq_free", {{1, 1}, {1, 1}, {2, 2}, {2, 2}}, 4,
         wg_o4_squares(N, 1, 2, 1, 2).to_double()},
        {"wg_mx_paired", {{1, 1}, {1, 2}, {2, 1}, {2, 2}}, 4,
         wg_o4_mixed(N, 1, 1, 2, 2, 1, 2).to_double()},
        {"wg_mx_crossed", {{1, 1}, {2, 2}, {2, 1}, {1, 2}}, 4,
         wg_o4_mixed(N, 1, 2, 2, 1, 1, 2).to_double()},
        {"wg_mx_paired_q", {{1, 1}, {1, 1}, {2, 1}, {2, 1}}, 4,
         wg_o4_mixed(N, 1, 1, 2, 2, 1, 1).to_double()},
        {"wg_mx_crossed_q", {{1, 1}, {2, 1}, {2, 1}, {1, 1}}, 4,
         wg_o4_mixed(N, 1, 2, 2, 1, 1, 1).to_double()},
        {"wg_mx_zero", {{1, 1}, {2, 2}, {3, 1}, {1, 2}}, 4,
         wg_o4_mixed(N, 1, 2, 3, 1, 1, 2).to_double()},
        {"wg_mx_zero_q", {{1, 1}, {2, 1}, {3, 1}, {3, 1}}, 4,
         wg_o4_mixed(N, 1, 2, 3, 3, 1, 1).to_double()},
    };
    const Rng base(seed, 21);
    for (size_t i = 0; i < battery.size(); ++i) {
      const Pattern& p = battery[i];
      Rng sub = base.split(i);
      const McEstimate mc =
          mc_haar_moment(N, p.entries, p.degree, opts.weingarten_samples, sub.next_u64());
      const double z = std::abs(mc.estimate - p.exact) / mc.std_err;
      out.push_back(OracleResult{p.name, z <= 4.0, z > 6.0, z,
                                 "estimate=" + format_double(mc.estimate) +
                                     " exact=" + format_double(p.exact) +
                                     " se=" + format_double(mc.std_err)});
    }
  }

  if (opts.moments) {
    Rng rng(seed, 31);
    const MomentOracle oracle = moment_oracle(opts.moment_n, opts.moment_s);
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(opts.moment_reps));
    for (Index r = 0; r < opts.moment_reps; ++r) {
      const PointCloud E = gen_noise(opts.moment_n, opts.moment_d, 1.0, rng);
      const CompressedCloud C = compress(E, opts.moment_s, true, CloudSource::noise);
      vals.push_back((C.points.col(0) - C.points.col(1)).squaredNorm());
    }
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double ss = 0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(vals.size() - 1);
    const double mean_rel = std::abs(mean - oracle.mean) / oracle.mean;
    const double var_rel = std::abs(var - oracle.variance) / oracle.variance;
    const std::string scale = "n=" + std::to_string(static_cast<long long>(opts.moment_n)) +
                              " s=" + std::to_string(static_cast<long long>(opts.moment_s)) +
                              " d=" + std::to_string(static_cast<long long>(opts.moment_d)) +
                              " reps=" + std::to_string(static_cast<long long>(opts.moment_reps));
    out.push_back(OracleResult{"moment_mean", mean_rel <= 0.05, mean_rel > 0.10, mean_rel,
                               "mean=" + format_double(mean) +
                                   " target=" + format_double(oracle.mean) + " " + scale});
    out.push_back(OracleResult{"moment_variance", var_rel <= 0.15, var_rel > 0.30, var_rel,
                               "variance=" + format_double(var) +
                                   " target=" + format_double(oracle.variance) + " " + scale});
  }

  return out;
}

ExperimentReport run_validation_suite(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ValidationOptions opts;
  if (cfg.experiment == ExperimentKind::simplex_check) {
    opts.weingarten = false;
    opts.moments = false;
  } else if (cfg.experiment == ExperimentKind::weingarten_check) {
    opts.simplex = false;
    opts.bottleneck = false;
  }
  ExperimentReport rep;
  rep.config = cfg;
  rep.oracle_results = validation_oracles(cfg.seed, opts);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::curse: return run_curse(cfg);
    case ExperimentKind::mitigation: return run_mitigation(cfg);
    case ExperimentKind::eigengap: return run_eigengap(cfg);
    case ExperimentKind::simplex_check:
    case ExperimentKind::weingarten_check: return run_validation_suite(cfg);
  }
  throw std::invalid_argument("config: unknown experiment kind");
}

std::string records_to_csv(const std::vector<MetricRecord>& records) {
  std::string out = "experiment,d,seed,degree,metric,target_pair,value,runtime_ms\n";
  for (const MetricRecord& r : records) {
    out += r.experiment;
    out += ',';
    out += std::to_string(static_cast<long long>(r.d));
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.degree);
    out += ',';
    out += r.metric;
    out += ',';
    out += r.target_pair;
    out += ',';
    out += r.is_inf ? "inf" : format_double(r.value);
    out += ',';
    out += format_double(r.runtime_ms);
    out += '\n';
  }
  return out;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  j["per_d"] = nlohmann::json::array();
  for (const PerDAggregate& agg : report.per_d) {
    nlohmann::json e;
    e["d"] = static_cast<long long>(agg.d);
    nlohmann::json med = nlohmann::json::object(), iqr = nlohmann::json::object();
    for (const auto& [k, v] : agg.medians) med[k] = json_finite_or_inf(v);
    for (const auto& [k, v] : agg.iqr) iqr[k] = json_finite_or_inf(v);
    e["medians"] = med;
    e["iqr"] = iqr;
    j["per_d"].push_back(e);
  }
  j["trend_labels"] = report.trend_labels;
  j["oracle_results"] = nlohmann::json::array();
  for (const OracleResult& o : report.oracle_results) {
    nlohmann::json e;
    e["name"] = o.name;
    e["pass"] = o.pass;
    e["hard"] = o.hard;
    e["deviation"] = json_finite_or_inf(o.deviation);
    e["details"] = o.details;
    j["oracle_results"].push_back(e);
  }
  return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canonical = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08llx",
                static_cast<unsigned long long>((h ^ (h >> 32)) & 0xffffffffULL));
  return buf;
}

std::vector<std::string> emit_report(const ExperimentReport& report, ReportFormat format) {
  const std::string hash = config_hash(report.config);
  std::vector<std::string> paths;
  const auto write = [&](const char* ext, const std::string& content) {
    const std::string path = report.config.out + "-" + hash + ext;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_report: cannot open " + path);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("emit_report: write failed for " + path);
    paths.push_back(path);
  };
  if (format == ReportFormat::csv || format == ReportFormat::both)
    write(".csv", records_to_csv(report.records));
  if (format == ReportFormat::json || format == ReportFormat::both)
    write(".json", report_to_json(report));
  return paths;
}

}  // namespace hdph
