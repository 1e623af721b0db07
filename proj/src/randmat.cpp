#include "hdph/randmat.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hdph {

namespace {

void check_entry_index(int v, int N, const char* name) {
  if (v < 1 || v > N)
    throw std::invalid_argument(std::string("weingarten: index ") + name + " out of [1, N]");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Rational::Rational(long long n, long long d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long long g = std::gcd(n < 0 ? -n : n, d);  // >= 1 since d > 0
  num = n / g;
  den = d / g;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}

Rational wg_o2(int N, int m, int t, int k) {
  if (N < 1) throw std::invalid_argument("wg_o2: N must be >= 1");
  check_entry_index(m, N, "m");
  check_entry_index(t, N, "t");
  check_entry_index(k, N, "k");
  return m == t ? Rational(1, N) : Rational(0, 1);
}

Rational wg_o4_squares(int N, int m, int t, int k, int q) {
  if (N < 1) throw std::invalid_argument("wg_o4_squares: N must be >= 1");
  check_entry_index(m, N, "m");
  check_entry_index(t, N, "t");
  check_entry_index(k, N, "k");
  check_entry_index(q, N, "q");
  const long long Nl = N;
  if (m == t && k == q) return Rational(3, Nl * (Nl + 2));
  if (m == t || k == q) return Rational(1, Nl * (Nl + 2));
  return Rational(Nl + 1, Nl * (Nl - 1) * (Nl + 2));
}

Rational wg_o4_mixed(int N, int m, int t, int mp, int tp, int k, int q) {
  if (N < 1) throw std::invalid_argument("wg_o4_mixed: N must be >= 1");
  check_entry_index(m, N, "m");
  check_entry_index(t, N, "t");
  check_entry_index(mp, N, "mp");
  check_entry_index(tp, N, "tp");
  check_entry_index(k, N, "k");
  check_entry_index(q, N, "q");
  if (m == mp && t == tp)
    throw std::invalid_argument("wg_o4_mixed: repeated row pair, use wg_o4_squares");
  const bool paired_rows = (m == t && mp == tp);   // each column pairs within one row
  const bool crossed_rows = (m == tp && t == mp);  // the two columns swap rows
  if (!paired_rows && !crossed_rows) return Rational(0, 1);
  const long long Nl = N;
  if (k == q) return Rational(1, Nl * (Nl + 2));
  return Rational(-1, Nl * (Nl - 1) * (Nl + 2));
}

MomentOracle moment_oracle(Index n, Index s) {
  if (n < 2) throw std::invalid_argument("moment_oracle: n must be >= 2");
  if (s < 1 || s > n - 1) throw std::invalid_argument("moment_oracle: s must be in [1, n-1]");
  const double nn = static_cast<double>(n), ss = static_cast<double>(s);
  MomentOracle out;
  out.mean = 2.0 * ss;
  out.variance = (-8.0 * ss * ss + 8.0 * (nn - 1.0) * ss) / (nn + 1.0);
  return out;
}

Matrix sample_wishart(Index n, Index d, Rng& rng) {
  const Matrix G = sample_gaussian_matrix(n, d, 1.0, rng);
  Matrix W = G * G.transpose();
  return 0.5 * (W + W.transpose());
}

Matrix sample_wishart(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  return sample_wishart(n, d, rng);
}

double min_eigengap(const std::vector<double>& eigenvalues_descending) {
  if (eigenvalues_descending.size() < 2)
    throw std::invalid_argument("min_eigengap: need at least 2 eigenvalues");
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < eigenvalues_descending.size(); ++i) {
    const double g = eigenvalues_descending[i] - eigenvalues_descending[i + 1];
    if (g < 0) throw std::invalid_argument("min_eigengap: list is not non-increasing");
    gap = std::min(gap, g);
  }
  return gap;
}

EigengapSeries eigengap_experiment(Index n, const std::vector<Index>& d_grid, Index reps,
                                   std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("eigengap_experiment: n must be >= 2");
  if (reps < 1) throw std::invalid_argument("eigengap_experiment: reps must be >= 1");
  if (d_grid.empty()) throw std::invalid_argument("eigengap_experiment: empty d grid");
  for (size_t i = 0; i < d_grid.size(); ++i) {
    if (d_grid[i] < n) throw std::invalid_argument("eigengap_experiment: each d must be >= n");
    if (i > 0 && d_grid[i] <= d_grid[i - 1])
      throw std::invalid_argument("eigengap_experiment: d grid must be strictly increasing");
  }

  const Rng root(seed);
  EigengapSeries series;
  series.n = n;
  series.reps = reps;
  series.grid.reserve(d_grid.size());
  std::vector<double> gaps(static_cast<size_t>(reps));
  std::vector<double> evs(static_cast<size_t>(n));
  for (size_t i = 0; i < d_grid.size(); ++i) {
    for (Index j = 0; j < reps; ++j) {
      Rng rng = root.split(static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(reps) +
                           static_cast<std::uint64_t>(j));
      const Matrix W = sample_wishart(n, d_grid[i], rng);
      const SpectralDecomposition spec = spectral_decomposition(W);
      for (Index k = 0; k < n; ++k) evs[static_cast<size_t>(k)] = spec.eigenvalues(k);
      gaps[static_cast<size_t>(j)] = min_eigengap(evs);
    }
    double mean = 0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(reps);
    double ss = 0;
    for (double g : gaps) ss += (g - mean) * (g - mean);
    const double std_err =
        reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
    series.grid.push_back(EigengapPoint{d_grid[i], mean, std_err});
  }
  return series;
}

McEstimate mc_haar_moment(int N, const std::vector<std::pair<int, int>>& pattern, int degree,
                          Index reps, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("mc_haar_moment: N must be >= 1");
  if (degree != 2 && degree != 4) throw std::invalid_argument("mc_haar_moment: degree must be 2 or 4");
  if (static_cast<int>(pattern.size()) != degree)
    throw std::invalid_argument("mc_haar_moment: pattern length must equal degree");
  if (reps < 100) throw std::invalid_argument("mc_haar_moment: reps must be >= 100");
  for (const auto& [r, c] : pattern) {
    check_entry_index(r, N, "row");
    check_entry_index(c, N, "col");
  }

  Rng rng(seed);
  std::vector<double> vals(static_cast<size_t>(reps));
  for (Index i = 0; i < reps; ++i) {
    const Matrix Q = haar_orthogonal(N, rng);
    double prod = 1.0;
    for (const auto& [r, c] : pattern) prod *= Q(r - 1, c - 1);
    vals[static_cast<size_t>(i)] = prod;
  }
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(reps);
  double ss = 0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  McEstimate est;
  est.estimate = mean;
  est.std_err = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  return est;
}

std::string eigengap_to_csv(const EigengapSeries& series, const SqrtFitParams* fit) {
  std::string out = "d,mean_min_gap,std_err\n";
  for (const EigengapPoint& p : series.grid) {
    out += std::to_string(static_cast<long long>(p.d));
    out += ',';
    out += format_double(p.mean_min_gap);
    out += ',';
    out += format_double(p.std_err);
    out += '\n';
  }
  if (fit) {
    out += "# fit = {\"x\": " + format_double(fit->x) + ", \"y\": " + format_double(fit->y) +
           ", \"z\": " + format_double(fit->z) + ", \"rss\": " + format_double(fit->rss) + "}\n";
  }
  return out;
}

void write_eigengap_csv(const std::string& path, const EigengapSeries& series,
                        const SqrtFitParams* fit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_eigengap_csv: cannot open " + path);
  out << eigengap_to_csv(series, fit);
}

}  // namespace hdph
