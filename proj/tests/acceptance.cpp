// Acceptance gate: runs the ten headline checks end to end, prints one
// [PASS]/[FAIL] line per criterion, and exits with the number of failures.
#include "hdph/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace hdph;

struct Outcome {
  bool pass = false;
  std::string details;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

double median_of(const ExperimentReport& rep, Index d, const std::string& key) {
  for (const auto& agg : rep.per_d) {
    if (agg.d != d) continue;
    auto it = agg.medians.find(key);
    if (it == agg.medians.end()) throw std::runtime_error("missing series " + key);
    return it->second;
  }
  throw std::runtime_error("missing aggregate for d=" + std::to_string(d));
}

// --- regular-simplex diagram oracles -----------------------------------------

Outcome simplex_oracle(Filtration filt, Index n_max) {
  const double nu_d = 2.0;
  for (Index n = 3; n <= n_max; ++n) {
    const PointCloud cloud = regular_simplex_cloud(n, nu_d);
    FilteredComplex K;
    if (filt == Filtration::rips) {
      K = rips_complex(pairwise_distances(cloud), static_cast<int>(n) - 2);
    } else {
      K = cech_complex(cloud, static_cast<int>(n) - 2);
    }
    const std::vector<PersistenceDiagram> diags = compute_diagrams(K);
    for (int N = 0; N <= static_cast<int>(n) - 2; ++N) {
      const PersistenceDiagram expected = analytic_simplex_diagram(filt, n, nu_d, N);
      std::string why;
      if (!diagrams_match(diags[static_cast<std::size_t>(N)], expected, 1e-9, &why)) {
        return {false, "n=" + std::to_string(n) + " degree " + std::to_string(N) + ": " + why};
      }
    }
  }
  return {true, "n=3.." + std::to_string(n_max) + " all degrees match at 1e-9, multiplicities exact"};
}

// --- bottleneck cross-validation and Hausdorff domination --------------------

Outcome bottleneck_exactness() {
  Rng rng(20260819, 0);
  double max_diff = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PersistenceDiagram a = random_diagram(rng, 5, true);
    const PersistenceDiagram b = random_diagram(rng, 5, true);
    const DiagramDistanceResult fast = bottleneck_distance(a, b);
    const DiagramDistanceResult slow = bottleneck_distance_bruteforce(a, b);
    if (fast.is_inf != slow.is_inf) return {false, "infinity flag mismatch at trial " + std::to_string(trial)};
    const double diff = std::fabs(fast.value - slow.value);
    if (diff > max_diff) max_diff = diff;
    if (diff != 0.0) {
      return {false, "trial " + std::to_string(trial) + ": fast " + fmt(fast.value) + " vs exhaustive " + fmt(slow.value)};
    }
  }
  return {true, "500 pairs, fast == exhaustive exactly"};
}

Outcome hausdorff_domination() {
  Rng rng(20260819, 1);
  int violations = 0;
  double worst_gap = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PersistenceDiagram a = random_diagram(rng, 5, true);
    const PersistenceDiagram b = random_diagram(rng, 5, true);
    const double dh = hausdorff_distance(a, b, true).value;
    const double db = bottleneck_distance(a, b).value;
    if (dh > db + 1e-12) {
      ++violations;
      if (dh - db > worst_gap) worst_gap = dh - db;
    }
  }
  if (violations > 0) {
    return {false, std::to_string(violations) + " violations, worst gap " + fmt(worst_gap)};
  }
  return {true, "500 trials, d_H(augmented) <= d_B throughout"};
}

// --- statistical oracle batteries ---------------------------------------------

Outcome weingarten_closed_forms() {
  ValidationOptions opts;
  opts.simplex = false;
  opts.bottleneck = false;
  opts.moments = false;
  opts.weingarten_samples = 100000;
  const std::vector<OracleResult> results = validation_oracles(20260819, opts);
  if (results.size() != 12) return {false, "expected 12 pattern checks, got " + std::to_string(results.size())};
  double max_z = 0;
  for (const auto& r : results) {
    if (std::fabs(r.deviation) > max_z) max_z = std::fabs(r.deviation);
    if (!r.pass) return {false, r.name + " off closed form: " + r.details};
  }
  return {true, "12 patterns at 1e5 samples, max |z| = " + fmt(max_z)};
}

Outcome compressed_noise_moments() {
  ValidationOptions opts;
  opts.simplex = false;
  opts.bottleneck = false;
  opts.weingarten = false;
  const std::vector<OracleResult> results = validation_oracles(20260819, opts);
  if (results.size() != 2) return {false, "expected 2 moment checks, got " + std::to_string(results.size())};
  std::string detail;
  for (const auto& r : results) {
    if (!detail.empty()) detail += ", ";
    detail += r.name + " rel dev " + fmt(r.deviation);
    if (!r.pass) return {false, r.name + " outside band: " + r.details};
  }
  return {true, detail + " (bands 5% mean, 15% variance)"};
}

// --- eigengap divergence -------------------------------------------------------

Outcome eigengap_divergence() {
  const EigengapSeries series = eigengap_experiment(10, {200, 800, 3200}, 500, 20260819);
  const std::vector<EigengapPoint>& g = series.grid;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i].mean_min_gap > g[i - 1].mean_min_gap)) {
      return {false, "mean min-gap not increasing: " + fmt(g[i - 1].mean_min_gap) + " then " + fmt(g[i].mean_min_gap)};
    }
  }
  const double ratio = g[2].mean_min_gap / g[1].mean_min_gap;
  if (!(ratio >= 1.5 && ratio <= 2.5)) {
    return {false, "mean(3200)/mean(800) = " + fmt(ratio) + " outside [1.5, 2.5]"};
  }
  return {true, "means " + fmt(g[0].mean_min_gap) + " < " + fmt(g[1].mean_min_gap) + " < " + fmt(g[2].mean_min_gap) +
                    ", 4x-d ratio " + fmt(ratio)};
}

// --- headline experiments -------------------------------------------------------

ExperimentConfig paper_scale_config() {
  ExperimentConfig cfg;  // defaults: rips, n=40 circle, s=2, nu=0.01, d in {1e2,1e3,1e4}, 20 reps
  cfg.out = "/tmp/hdph_acceptance";
  return cfg;
}

Outcome curse_growth() {
  ExperimentConfig cfg = paper_scale_config();
  const ExperimentReport rep = run_curse(cfg);

  const double med_db = median_of(rep, 10000, series_key("d_B", "P_vs_Pobs", 0));
  const double pred = std::sqrt(2.0 * cfg.nu * 10000.0) / 4.0;
  const double ratio = med_db / pred;
  const double h100 = median_of(rep, 100, series_key("d_H", "P_vs_Pobs", 1));
  const double h1k = median_of(rep, 1000, series_key("d_H", "P_vs_Pobs", 1));
  const double h10k = median_of(rep, 10000, series_key("d_H", "P_vs_Pobs", 1));

  const bool ratio_ok = ratio >= 0.85 && ratio <= 1.15;
  const bool growth_ok = h100 < h1k && h1k < h10k;
  std::string detail = "median d_B(deg0) x 4/sqrt(2 nu d) = " + fmt(ratio) + " at d=1e4; d_H(deg1) medians " +
                       fmt(h100) + " -> " + fmt(h1k) + " -> " + fmt(h10k);
  return {ratio_ok && growth_ok, detail};
}

std::optional<ExperimentReport> mitigation_report;

Outcome mitigation_by_compression() {
  ExperimentConfig cfg = paper_scale_config();
  cfg.experiment = ExperimentKind::mitigation;
  mitigation_report = run_mitigation(cfg);
  const ExperimentReport& rep = *mitigation_report;

  const double hat100 = median_of(rep, 100, series_key("d_H", "P_vs_Phat", 1));
  const double hat10k = median_of(rep, 10000, series_key("d_H", "P_vs_Phat", 1));
  const double obs100 = median_of(rep, 100, series_key("d_H", "P_vs_Pobs", 1));
  const double obs10k = median_of(rep, 10000, series_key("d_H", "P_vs_Pobs", 1));
  // Distance between the full diagram collections = max over recorded degrees.
  const auto pe = [&](Index d) {
    double m = 0;
    for (int N : cfg.degrees) m = std::max(m, median_of(rep, d, series_key("d_B", "Phat_vs_Ehat", N)));
    return m;
  };
  const double pe100 = pe(100);
  const double pe1k = pe(1000);
  const double pe10k = pe(10000);

  const bool hat_bounded = std::isfinite(hat10k) && hat10k <= 2.0 * hat100;
  const bool obs_grows = obs10k >= 5.0 * obs100;
  const bool pe_shrinks = pe100 > pe1k && pe1k > pe10k;
  std::string detail = "d_H(P,Phat,deg1) " + fmt(hat100) + " -> " + fmt(hat10k) + " (<= 2x); d_H(P,Pobs,deg1) " +
                       fmt(obs100) + " -> " + fmt(obs10k) + " (>= 5x); max-degree d_B(Phat,Ehat) " + fmt(pe100) +
                       " > " + fmt(pe1k) + " > " + fmt(pe10k);
  return {hat_bounded && obs_grows && pe_shrinks, detail};
}

Outcome davis_kahan_bound() {
  if (!mitigation_report) return {false, "mitigation run unavailable"};
  for (const auto& r : mitigation_report->oracle_results) {
    if (r.name != "davis_kahan") continue;
    if (!r.pass) return {false, r.details};
    if (r.details.find("violations=0") == std::string::npos) return {false, "unexpected detail: " + r.details};
    return {true, r.details};
  }
  return {false, "davis_kahan oracle missing from mitigation report"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
    double cap_ms;  // 0 = no stated runtime cap
  };
  const std::vector<Criterion> criteria = {
      {"simplex_oracle_rips", [] { return simplex_oracle(Filtration::rips, 7); }, 1e3},
      {"simplex_oracle_cech", [] { return simplex_oracle(Filtration::cech, 6); }, 1e4},
      {"bottleneck_exactness", bottleneck_exactness, 3e4},
      {"hausdorff_dominated_by_bottleneck", hausdorff_domination, 0},
      {"weingarten_closed_forms", weingarten_closed_forms, 6e4},
      {"compressed_noise_moments", compressed_noise_moments, 3e5},
      {"eigengap_divergence", eigengap_divergence, 3e5},
      {"curse_growth", curse_growth, 6e5},
      {"mitigation_by_compression", mitigation_by_compression, 9e5},
      {"davis_kahan_bound", davis_kahan_bound, 0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(std::chrono::steady_clock::now() - t0)
            .count();
    if (o.pass && c.cap_ms > 0 && ms > c.cap_ms) {
      o.pass = false;
      o.details += "; runtime " + fmt(ms) + " ms exceeds cap " + fmt(c.cap_ms) + " ms";
    }
    std::printf("[%s] %s (%s, %.0f ms)\n", o.pass ? "PASS" : "FAIL", c.name, o.details.c_str(), ms);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/10 criteria passed\n", 10 - static_cast<int>(failures));
  return failures;
}
