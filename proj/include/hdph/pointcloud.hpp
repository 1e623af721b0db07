#pragma once

#include "hdph/numerics.hpp"

#include <string>

namespace hdph {

enum class Shape { circle, uniform_square, custom_points };

// A cloud of n points in R^d, stored as the d x n matrix whose columns are the
// points.  essential_dim records how many leading coordinates carry signal:
// clouds built by gen_original have exactly zero rows below essential_dim.
struct PointCloud {
  Matrix coords;              // d x n
  Index essential_dim = 0;    // s; equals d when every coordinate is "signal"

  Index dim() const { return coords.rows(); }
  Index size() const { return coords.cols(); }
};

struct GeometryReport {
  double nu = 0;
  Index d = 0;
  double max_norm_dev = 0;  // max_i | ||x_i|| - sqrt(nu d) |
  double max_pair_dev = 0;  // max_{i<j} | ||x_i - x_j|| - sqrt(2 nu d) |
  double max_abs_cos = 0;   // max_{i<j} |<x_i, x_j>| / (||x_i|| ||x_j||)
};

// Signal cloud: the first s coordinates carry the shape, the remaining d - s
// are exactly zero.  circle = n equispaced unit-circle points in coords 1-2;
// uniform_square = i.i.d. uniform [-1,1] in each of the first s coordinates.
PointCloud gen_original(Shape shape, Index n, Index s, Index d, std::uint64_t seed);

// Verbatim embedding of given s-dimensional points (s x n) into R^d.
PointCloud gen_custom(const Matrix& points_s_by_n, Index d);

// Noise cloud: i.i.d. N(0, nu) coordinates.
PointCloud gen_noise(Index n, Index d, double nu, std::uint64_t seed);
PointCloud gen_noise(Index n, Index d, double nu, Rng& rng);

// Observed cloud x'_i = x_i + e_i (order preserved).
PointCloud observe(const PointCloud& P, const PointCloud& E);

// Symmetric n x n Euclidean distance matrix with zero diagonal.
Matrix pairwise_distances(const PointCloud& Z);

GeometryReport geometry_report(const PointCloud& Pp, double nu);

// CSV: header "# d=<d> n=<n> s=<s>", then one point per row, d columns.
std::string cloud_to_csv(const PointCloud& Z);
void write_cloud_csv(const PointCloud& Z, const std::string& path);

}  // namespace hdph
