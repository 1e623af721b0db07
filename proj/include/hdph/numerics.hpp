#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace hdph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Deterministic splittable PRNG: every consumer is keyed by (seed, stream),
// so replication loops can hand out disjoint substreams without sharing state.
// Reproducibility is guaranteed within one build, not across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal();                 // N(0, 1)
  double uniform();                // U[0, 1)
  std::uint64_t next_u64();

  Rng split(std::uint64_t substream) const;  // fresh generator keyed off this one

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // orthonormal columns, column k pairs with eigenvalues[k]
  double residual = 0;  // max_k ||A v_k - lambda_k v_k||_2
};

struct SqrtFitParams {
  double x = 0;    // scale
  double y = 0;    // shift (model requires d - y > 0 on the data range)
  double z = 0;    // offset
  double rss = 0;  // residual sum of squares
};

// rows x cols of i.i.d. N(0, variance) entries; same (seed) => identical matrix.
Matrix sample_gaussian_matrix(Index rows, Index cols, double variance, std::uint64_t seed);
Matrix sample_gaussian_matrix(Index rows, Index cols, double variance, Rng& rng);

// Symmetric eigendecomposition with eigenvalues sorted descending and a
// deterministic sign convention: each eigenvector's largest-|component|
// (first such index on ties) is made positive. Residual above tol is an error.
SpectralDecomposition spectral_decomposition(const Matrix& A, double tol = 1e-9);

// Haar-distributed orthogonal matrix: Gaussian matrix -> QR, R diagonal made positive.
Matrix haar_orthogonal(Index n, std::uint64_t seed);
Matrix haar_orthogonal(Index n, Rng& rng);

// Least squares fit of values ~ x*sqrt(ds - y) + z.  Coarse grid over y
// (step = min spacing of ds, with (x, z) solved linearly at each y) followed
// by Gauss-Newton refinement of all three parameters.
SqrtFitParams fit_sqrt_model(const std::vector<double>& ds, const std::vector<double>& values);

}  // namespace hdph
