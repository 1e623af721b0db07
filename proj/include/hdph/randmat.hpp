#pragma once

#include "hdph/numerics.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hdph {

// Exact rational, always normalized: den > 0, gcd(|num|, den) == 1.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }
};

// Second-order moment of a Haar orthogonal matrix: E[g_mk g_tk].
// Indices are 1-based.
Rational wg_o2(int N, int m, int t, int k);

// Fourth-order square moment E[g_mk^2 g_tq^2].
Rational wg_o4_squares(int N, int m, int t, int k, int q);

// Fourth-order mixed moment E[g_mk g_tq g_m'k g_t'q] for (m,t) != (m',t').
Rational wg_o4_mixed(int N, int m, int t, int mp, int tp, int k, int q);

// Expected squared distance between compressed noise points and its variance:
// mean = 2s, variance = (-8s^2 + 8(n-1)s) / (n+1).
struct MomentOracle {
  double mean = 0;
  double variance = 0;
};
MomentOracle moment_oracle(Index n, Index s);

// W = G G^T for an n x d matrix of standard Gaussians, symmetrized exactly.
Matrix sample_wishart(Index n, Index d, std::uint64_t seed);
Matrix sample_wishart(Index n, Index d, Rng& rng);

// Minimum consecutive difference of a non-increasing list (length >= 2).
double min_eigengap(const std::vector<double>& eigenvalues_descending);

struct EigengapPoint {
  Index d = 0;
  double mean_min_gap = 0;
  double std_err = 0;
};

struct EigengapSeries {
  Index n = 0;
  Index reps = 0;
  std::vector<EigengapPoint> grid;
};

// For each d in the (strictly increasing, all >= n) grid, averages the minimum
// eigengap of `reps` independent Wishart samples.  Replicates use disjoint
// substreams of `seed`, so results are independent of grid order.
EigengapSeries eigengap_experiment(Index n, const std::vector<Index>& d_grid, Index reps,
                                   std::uint64_t seed);

struct McEstimate {
  double estimate = 0;
  double std_err = 0;
};

// Monte Carlo estimate of E[prod g_{r,c}] over Haar orthogonal matrices for a
// pattern of 1-based (row, col) entries; degree must equal the pattern length
// and be 2 or 4.
McEstimate mc_haar_moment(int N, const std::vector<std::pair<int, int>>& pattern, int degree,
                          Index reps, std::uint64_t seed);

// CSV "d,mean_min_gap,std_err"; if a fit is given, a trailing comment line
// carries it as JSON.
std::string eigengap_to_csv(const EigengapSeries& series, const SqrtFitParams* fit = nullptr);
void write_eigengap_csv(const std::string& path, const EigengapSeries& series,
                        const SqrtFitParams* fit = nullptr);

}  // namespace hdph
