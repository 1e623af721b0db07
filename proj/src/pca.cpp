#include "hdph/pca.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hdph {

Matrix centering_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("centering_matrix: n must be >= 1");
  Matrix P = Matrix::Identity(n, n);
  P.array() -= 1.0 / static_cast<double>(n);
  return P;
}

Matrix dual_sample_covariance(const PointCloud& Z) {
  const Index n = Z.size();
  if (n < 2) throw std::invalid_argument("dual_sample_covariance: need at least 2 points");
  const Matrix X = Z.coords * centering_matrix(n);  // column-centered cloud
  return (X.transpose() * X) / static_cast<double>(n - 1);
}

SpectralDecomposition dual_spectrum(const PointCloud& Z) {
  const Index n = Z.size();
  SpectralDecomposition spec = spectral_decomposition(dual_sample_covariance(Z));
  // The all-ones direction is an exact null vector of the dual covariance; pin
  // it so the trailing eigenpair is deterministic even when the kernel is
  // degenerate.
  spec.eigenvalues(n - 1) = 0.0;
  spec.eigenvectors.col(n - 1) = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  return spec;
}

CompressedCloud compress(const PointCloud& Pp, Index s, bool normalized, CloudSource source) {
  const Index n = Pp.size();
  if (n < 2) throw std::invalid_argument("compress: need at least 2 points");
  if (s < 1 || s > n - 1) throw std::invalid_argument("compress: s must be in [1, n-1]");
  const SpectralDecomposition spec = dual_spectrum(Pp);
  const double scale = std::sqrt(static_cast<double>(n - 1));

  CompressedCloud out;
  out.source = source;
  out.s = s;
  out.normalized = normalized;
  out.eigenvalues_used = spec.eigenvalues.head(s);
  out.points = Matrix(s, n);
  for (Index k = 0; k < s; ++k) {
    double w = scale;
    if (!normalized) w *= std::sqrt(std::max(spec.eigenvalues(k), 0.0));
    out.points.row(k) = w * spec.eigenvectors.col(k).transpose();
  }
  return out;
}

Vector sign_align(const Vector& u, const Vector& ref) {
  if (u.size() != ref.size()) throw std::invalid_argument("sign_align: size mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(ref.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("sign_align: inputs must be unit vectors");
  return u.dot(ref) < 0.0 ? Vector(-u) : u;
}

EigenClosenessReport eigen_closeness_report(const PointCloud& Pp, const PointCloud& E, Index s) {
  const Index n = Pp.size();
  if (E.size() != n || E.dim() != Pp.dim())
    throw std::invalid_argument("eigen_closeness_report: clouds must share shape");
  if (n < 2) throw std::invalid_argument("eigen_closeness_report: need at least 2 points");
  if (s < 1 || s > n - 1) throw std::invalid_argument("eigen_closeness_report: s must be in [1, n-1]");

  const SpectralDecomposition specP = dual_spectrum(Pp);
  const SpectralDecomposition specE = dual_spectrum(E);

  EigenClosenessReport rep;
  rep.closeness.reserve(static_cast<size_t>(s));
  for (Index k = 0; k < s; ++k) {
    const Vector aligned = sign_align(specP.eigenvectors.col(k), specE.eigenvectors.col(k));
    rep.closeness.push_back((aligned - specE.eigenvectors.col(k)).norm());
  }

  rep.min_gap = std::numeric_limits<double>::infinity();
  for (Index k = 0; k + 1 < n; ++k)
    rep.min_gap = std::min(rep.min_gap, specE.eigenvalues(k) - specE.eigenvalues(k + 1));

  // S_{D,P'} - S_{D,E} = P_n (P^T P + P^T E + E^T P) P_n / (n-1), P = P' - E.
  const Matrix P = Pp.coords - E.coords;
  const Matrix Pn = centering_matrix(n);
  const Matrix inner = P.transpose() * P + P.transpose() * E.coords + E.coords.transpose() * P;
  const Matrix M0 = Pn * inner * Pn / static_cast<double>(n - 1);
  const SpectralDecomposition specM = spectral_decomposition(M0);
  rep.m0_norm = std::max(std::abs(specM.eigenvalues(0)), std::abs(specM.eigenvalues(n - 1)));

  rep.bound = rep.min_gap > 0.0 ? std::pow(2.0, 1.5) * rep.m0_norm / rep.min_gap
                                : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace hdph
