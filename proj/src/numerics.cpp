#include "hdph/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hdph {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_key(seed, stream)), gauss_(0.0, 1.0) {}

double Rng::normal() { return gauss_(engine_); }

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

std::uint64_t Rng::next_u64() { return engine_(); }

Rng Rng::split(std::uint64_t substream) const {
  // Derive a key so that (seed, stream).split(k) differs from (seed, k).
  std::uint64_t s = stream_;
  std::uint64_t mixed = splitmix64(s) ^ (substream + 0x632be59bd9b4e019ULL);
  return Rng(seed_, mixed);
}

Matrix sample_gaussian_matrix(Index rows, Index cols, double variance, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("sample_gaussian_matrix: dimensions must be >= 1");
  if (!(variance > 0)) throw std::invalid_argument("sample_gaussian_matrix: variance must be > 0");
  const double sd = std::sqrt(variance);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = sd * rng.normal();
  return m;
}

Matrix sample_gaussian_matrix(Index rows, Index cols, double variance, std::uint64_t seed) {
  Rng rng(seed);
  return sample_gaussian_matrix(rows, cols, variance, rng);
}

SpectralDecomposition spectral_decomposition(const Matrix& A, double tol) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectral_decomposition: matrix must be square");
  if (!(tol > 0)) throw std::invalid_argument("spectral_decomposition: tol must be > 0");
  if (A.size() == 0) throw std::invalid_argument("spectral_decomposition: empty matrix");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw std::invalid_argument("spectral_decomposition: input asymmetric beyond 1e-10 (max |A-A^T| = " + std::to_string(asym) + ")");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (A + A.transpose()));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_decomposition: eigensolver failed to converge");

  const Index n = A.rows();
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();

  // Sign convention: largest-|component| entry (first index on ties) positive.
  for (Index k = 0; k < n; ++k) {
    Index imax = 0;
    double best = -1;
    for (Index i = 0; i < n; ++i) {
      const double a = std::abs(out.eigenvectors(i, k));
      if (a > best) { best = a; imax = i; }
    }
    if (out.eigenvectors(imax, k) < 0) out.eigenvectors.col(k) = -out.eigenvectors.col(k);
  }

  double residual = 0;
  for (Index k = 0; k < n; ++k)
    residual = std::max(residual, (A * out.eigenvectors.col(k) - out.eigenvalues[k] * out.eigenvectors.col(k)).norm());
  out.residual = residual;
  if (residual > tol)
    throw std::runtime_error("spectral_decomposition: residual " + std::to_string(residual) + " exceeds tol " + std::to_string(tol));
  return out;
}

Matrix haar_orthogonal(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("haar_orthogonal: n must be >= 1");
  Matrix g = sample_gaussian_matrix(n, n, 1.0, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Matrix haar_orthogonal(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_orthogonal(n, rng);
}

namespace {

// Given y, the model is linear in (x, z); solve that subproblem exactly.
void solve_linear_given_y(const std::vector<double>& ds, const std::vector<double>& values,
                          double y, double& x, double& z, double& rss) {
  const Index n = static_cast<Index>(ds.size());
  Matrix design(n, 2);
  Vector rhs(n);
  for (Index i = 0; i < n; ++i) {
    design(i, 0) = std::sqrt(ds[static_cast<size_t>(i)] - y);
    design(i, 1) = 1.0;
    rhs[i] = values[static_cast<size_t>(i)];
  }
  Vector sol = design.colPivHouseholderQr().solve(rhs);
  x = sol[0];
  z = sol[1];
  rss = (design * sol - rhs).squaredNorm();
}

}  // namespace

SqrtFitParams fit_sqrt_model(const std::vector<double>& ds, const std::vector<double>& values) {
  if (ds.size() != values.size()) throw std::invalid_argument("fit_sqrt_model: length mismatch");
  if (ds.size() < 4) throw std::invalid_argument("fit_sqrt_model: need at least 4 points");
  double min_spacing = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < ds.size(); ++i) {
    if (!(ds[i] > ds[i - 1])) throw std::invalid_argument("fit_sqrt_model: ds must be strictly increasing");
    min_spacing = std::min(min_spacing, ds[i] - ds[i - 1]);
  }

  const double span = ds.back() - ds.front();
  const double y_cap = ds.front() - 1e-9 * std::max(1.0, span);  // keep d - y > 0

  // Coarse grid over y, (x, z) solved linearly at each grid point.
  SqrtFitParams best;
  best.rss = std::numeric_limits<double>::infinity();
  for (double y = ds.front() - span; y <= y_cap; y += min_spacing) {
    double x, z, rss;
    solve_linear_given_y(ds, values, y, x, z, rss);
    if (rss < best.rss) best = {x, y, z, rss};
  }

  // Gauss-Newton refinement of (x, y, z).
  const Index n = static_cast<Index>(ds.size());
  double x = best.x, y = best.y, z = best.z, rss = best.rss;
  for (int iter = 0; iter < 100; ++iter) {
    Matrix jac(n, 3);
    Vector res(n);
    for (Index i = 0; i < n; ++i) {
      const double root = std::sqrt(ds[static_cast<size_t>(i)] - y);
      res[i] = x * root + z - values[static_cast<size_t>(i)];
      jac(i, 0) = root;
      jac(i, 1) = -x / (2.0 * root);
      jac(i, 2) = 1.0;
    }
    Vector step = jac.colPivHouseholderQr().solve(-res);
    if (!step.allFinite()) break;

    // Damped update: keep y on the valid side and require improvement.
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      const double xn = x + scale * step[0];
      const double yn = y + scale * step[1];
      const double zn = z + scale * step[2];
      if (yn > y_cap) continue;
      double rss_n = 0;
      for (size_t i = 0; i < ds.size(); ++i) {
        const double r = xn * std::sqrt(ds[i] - yn) + zn - values[i];
        rss_n += r * r;
      }
      if (rss_n <= rss) {
        x = xn; y = yn; z = zn;
        accepted = rss - rss_n > 1e-15 * (1.0 + rss);
        rss = rss_n;
        break;
      }
    }
    if (!accepted) break;
  }

  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(rss))
    throw std::runtime_error("fit_sqrt_model: refinement diverged");
  return {x, y, z, rss};
}

}  // namespace hdph
