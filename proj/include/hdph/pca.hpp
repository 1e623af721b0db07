#pragma once

#include "hdph/pointcloud.hpp"

#include <vector>

namespace hdph {

enum class CloudSource { observed, noise };

// Projection of a cloud onto the leading s dual eigenvectors.  Normalized
// scores are sqrt(n-1) * (u_i1, ..., u_is); classical scores additionally
// carry the sqrt(eigenvalue) weights.
struct CompressedCloud {
  CloudSource source = CloudSource::observed;
  Index s = 0;
  Matrix points;            // s x n, columns are compressed points
  Vector eigenvalues_used;  // leading s eigenvalues of the dual covariance
  bool normalized = true;

  PointCloud as_cloud() const { return PointCloud{points, s}; }
};

// I_n - (1/n) 1 1^T: symmetric, idempotent, zero row sums.
Matrix centering_matrix(Index n);

// S_D = (Z P_n)^T (Z P_n) / (n - 1): n x n, positive semidefinite, and
// S_D 1 = 0 (it shares its nonzero eigenvalues with the sample covariance).
Matrix dual_sample_covariance(const PointCloud& Z);

// Eigendecomposition of the dual covariance with the null direction pinned
// analytically: the last eigenpair is replaced by (0, 1/sqrt(n)), removing the
// solver's ambiguity in the degenerate subspace.
SpectralDecomposition dual_spectrum(const PointCloud& Z);

CompressedCloud compress(const PointCloud& Pp, Index s, bool normalized,
                         CloudSource source = CloudSource::observed);

// u if <u, ref> >= 0 else -u (zero scalar product counts as aligned).
Vector sign_align(const Vector& u, const Vector& ref);

struct EigenClosenessReport {
  std::vector<double> closeness;  // ||u_k - u_k^E|| after sign alignment, k = 1..s
  double min_gap = 0;             // min consecutive eigengap of the noise dual spectrum
  double m0_norm = 0;             // spectral norm of the perturbation M0
  double bound = 0;               // 2^{3/2} ||M0||_2 / min_gap
};

// Diagnostic comparing the observed cloud's dual eigenvectors against the
// noise cloud's, with the deterministic perturbation bound they must obey:
// M0 = P_n (P^T P + P^T E + E^T P) P_n / (n-1) where P = P' - E.
EigenClosenessReport eigen_closeness_report(const PointCloud& Pp, const PointCloud& E, Index s);

}  // namespace hdph
