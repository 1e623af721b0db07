#include "hdph/pointcloud.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace hdph {

PointCloud gen_original(Shape shape, Index n, Index s, Index d, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_original: n must be >= 1");
  if (s < 1 || s > d) throw std::invalid_argument("gen_original: need 1 <= s <= d");
  PointCloud cloud;
  cloud.coords = Matrix::Zero(d, n);
  cloud.essential_dim = s;
  switch (shape) {
    case Shape::circle: {
      if (s < 2) throw std::invalid_argument("gen_original: circle needs s >= 2");
      for (Index i = 0; i < n; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        cloud.coords(0, i) = std::cos(theta);
        cloud.coords(1, i) = std::sin(theta);
      }
      break;
    }
    case Shape::uniform_square: {
      Rng rng(seed);
      for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < s; ++k) cloud.coords(k, i) = 2.0 * rng.uniform() - 1.0;
      break;
    }
    case Shape::custom_points:
      throw std::invalid_argument("gen_original: custom_points requires gen_custom with explicit coordinates");
  }
  return cloud;
}

PointCloud gen_custom(const Matrix& points_s_by_n, Index d) {
  const Index s = points_s_by_n.rows();
  const Index n = points_s_by_n.cols();
  if (n < 1 || s < 1) throw std::invalid_argument("gen_custom: need at least one point and one coordinate");
  if (s > d) throw std::invalid_argument("gen_custom: s exceeds ambient dimension");
  if (!points_s_by_n.allFinite()) throw std::invalid_argument("gen_custom: coordinates must be finite");
  PointCloud cloud;
  cloud.coords = Matrix::Zero(d, n);
  cloud.coords.topRows(s) = points_s_by_n;
  cloud.essential_dim = s;
  return cloud;
}

PointCloud gen_noise(Index n, Index d, double nu, Rng& rng) {
  if (n < 1 || d < 1) throw std::invalid_argument("gen_noise: dimensions must be >= 1");
  if (!(nu > 0)) throw std::invalid_argument("gen_noise: nu must be > 0");
  PointCloud cloud;
  cloud.coords = sample_gaussian_matrix(d, n, nu, rng);
  cloud.essential_dim = d;
  return cloud;
}

PointCloud gen_noise(Index n, Index d, double nu, std::uint64_t seed) {
  Rng rng(seed);
  return gen_noise(n, d, nu, rng);
}

PointCloud observe(const PointCloud& P, const PointCloud& E) {
  if (P.dim() != E.dim() || P.size() != E.size())
    throw std::invalid_argument("observe: cloud shapes must match");
  PointCloud cloud;
  cloud.coords = P.coords + E.coords;
  cloud.essential_dim = P.essential_dim;
  return cloud;
}

Matrix pairwise_distances(const PointCloud& Z) {
  const Index n = Z.size();
  Matrix D = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double dist = (Z.coords.col(i) - Z.coords.col(j)).norm();
      D(i, j) = dist;
      D(j, i) = dist;
    }
  return D;
}

GeometryReport geometry_report(const PointCloud& Pp, double nu) {
  const Index n = Pp.size();
  if (n < 2) throw std::invalid_argument("geometry_report: need at least 2 points");
  GeometryReport rep;
  rep.nu = nu;
  rep.d = Pp.dim();
  const double norm_target = std::sqrt(nu * static_cast<double>(rep.d));
  const double pair_target = std::sqrt(2.0 * nu * static_cast<double>(rep.d));
  for (Index i = 0; i < n; ++i)
    rep.max_norm_dev = std::max(rep.max_norm_dev, std::abs(Pp.coords.col(i).norm() - norm_target));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      rep.max_pair_dev = std::max(rep.max_pair_dev,
                                  std::abs((Pp.coords.col(i) - Pp.coords.col(j)).norm() - pair_target));
      const double denom = Pp.coords.col(i).norm() * Pp.coords.col(j).norm();
      if (denom > 0)
        rep.max_abs_cos = std::max(rep.max_abs_cos,
                                   std::abs(Pp.coords.col(i).dot(Pp.coords.col(j))) / denom);
    }
  return rep;
}

std::string cloud_to_csv(const PointCloud& Z) {
  std::string out = "# d=" + std::to_string(Z.dim()) + " n=" + std::to_string(Z.size()) +
                    " s=" + std::to_string(Z.essential_dim) + "\n";
  char buf[64];
  for (Index i = 0; i < Z.size(); ++i) {
    for (Index k = 0; k < Z.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", Z.coords(k, i));
      out += buf;
      out += (k + 1 < Z.dim()) ? ',' : '\n';
    }
  }
  return out;
}

void write_cloud_csv(const PointCloud& Z, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_cloud_csv: cannot open " + path);
  f << cloud_to_csv(Z);
}

}  // namespace hdph
