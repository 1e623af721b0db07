#include "hdph/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace hdph {
namespace {

struct VectorHash {
  size_t operator()(const std::vector<int>& v) const {
    size_t h = 1469598103934665603ULL;
    for (int x : v) {
      h ^= static_cast<size_t>(x) + 0x9e3779b9;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

void check_complex_args(Index n, int max_hom_dim) {
  if (n < 2) throw std::invalid_argument("filtered complex: need n >= 2 points");
  if (max_hom_dim < 0) throw std::invalid_argument("filtered complex: max_hom_dim must be >= 0");
  if (max_hom_dim > n - 2)
    throw std::invalid_argument("filtered complex: max_hom_dim exceeds n - 2 nontriviality bound");
}

// Enumerate all vertex subsets of size 1 .. max_card, calling
// emit(vertices, value) where value is produced by the caller's evaluator.
template <typename Eval>
void enumerate_simplices(Index n, int max_card, Eval&& evaluate, std::vector<Simplex>& out) {
  std::vector<int> current;
  auto recurse = [&](auto&& self, int next) -> void {
    if (!current.empty()) out.push_back({evaluate(current), current});
    if (static_cast<int>(current.size()) == max_card) return;
    for (int v = next; v < n; ++v) {
      current.push_back(v);
      self(self, v + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
}

void sort_filtration(std::vector<Simplex>& simplices) {
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
  });
}

}  // namespace

FilteredComplex rips_complex(const Matrix& distances, int max_hom_dim) {
  const Index n = distances.rows();
  if (distances.cols() != n) throw std::invalid_argument("rips_complex: distance matrix must be square");
  check_complex_args(n, max_hom_dim);
  if ((distances - distances.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
      distances.diagonal().cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("rips_complex: need symmetric distances with zero diagonal");

  FilteredComplex K;
  K.n_vertices = n;
  K.max_dim = max_hom_dim + 1;
  auto half_diameter = [&](const std::vector<int>& vs) {
    double m = 0;
    for (size_t a = 0; a < vs.size(); ++a)
      for (size_t b = a + 1; b < vs.size(); ++b) m = std::max(m, distances(vs[a], vs[b]));
    return m / 2.0;
  };
  enumerate_simplices(n, max_hom_dim + 2, half_diameter, K.simplices);
  sort_filtration(K.simplices);
  return K;
}

double meb_radius(const Matrix& points) {
  const Index k = points.cols();
  if (k < 1) throw std::invalid_argument("meb_radius: need at least one point");
  if (k > 16) throw std::invalid_argument("meb_radius: exact solver limited to 16 points");
  if (k == 1) return 0.0;

  double best = std::numeric_limits<double>::infinity();
  const unsigned full = 1u << k;
  std::vector<int> members;
  for (unsigned mask = 1; mask < full; ++mask) {
    members.clear();
    for (Index i = 0; i < k; ++i)
      if (mask & (1u << i)) members.push_back(static_cast<int>(i));
    const size_t m = members.size();

    // Circumcenter of the subset within its affine hull: c = p0 + A t with
    // (A^T A) t = (||p_i - p0||^2 / 2)_i.  Affinely degenerate subsets are
    // skipped; their geometry is covered by a smaller subset.
    Vector center;
    if (m == 1) {
      center = points.col(members[0]);
    } else {
      Matrix A(points.rows(), m - 1);
      Vector rhs(m - 1);
      for (size_t i = 1; i < m; ++i) {
        A.col(i - 1) = points.col(members[i]) - points.col(members[0]);
        rhs[i - 1] = A.col(i - 1).squaredNorm() / 2.0;
      }
      const Matrix gram = A.transpose() * A;
      Eigen::FullPivLU<Matrix> lu(gram);
      if (!lu.isInvertible()) continue;
      center = points.col(members[0]) + A * lu.solve(rhs);
    }

    double radius = 0;
    for (int i : members) radius = std::max(radius, (points.col(i) - center).norm());
    if (radius >= best) continue;

    bool contains_all = true;
    for (Index i = 0; i < k && contains_all; ++i)
      contains_all = (points.col(i) - center).norm() <= radius * (1.0 + 1e-9) + 1e-15;
    if (contains_all) best = radius;
  }
  return best;
}

FilteredComplex cech_complex(const PointCloud& Z, int max_hom_dim) {
  const Index n = Z.size();
  check_complex_args(n, max_hom_dim);
  if (max_hom_dim + 2 > 16)
    throw std::invalid_argument("cech_complex: simplex cardinality exceeds the 16-point exact MEB limit");

  FilteredComplex K;
  K.n_vertices = n;
  K.max_dim = max_hom_dim + 1;
  auto ball_radius = [&](const std::vector<int>& vs) {
    Matrix pts(Z.dim(), static_cast<Index>(vs.size()));
    for (size_t i = 0; i < vs.size(); ++i) pts.col(static_cast<Index>(i)) = Z.coords.col(vs[i]);
    return meb_radius(pts);
  };
  enumerate_simplices(n, max_hom_dim + 2, ball_radius, K.simplices);

  // MEB radii are monotone under face inclusion in exact arithmetic; raise each
  // value to the max of its facets to erase sub-tolerance numeric inversions.
  std::unordered_map<std::vector<int>, double, VectorHash> value_of;
  std::sort(K.simplices.begin(), K.simplices.end(), [](const Simplex& a, const Simplex& b) {
    return a.vertices.size() < b.vertices.size();
  });
  for (auto& simplex : K.simplices) {
    if (simplex.vertices.size() > 1) {
      std::vector<int> facet(simplex.vertices.size() - 1);
      for (size_t skip = 0; skip < simplex.vertices.size(); ++skip) {
        size_t w = 0;
        for (size_t i = 0; i < simplex.vertices.size(); ++i)
          if (i != skip) facet[w++] = simplex.vertices[i];
        simplex.value = std::max(simplex.value, value_of.at(facet));
      }
    }
    value_of.emplace(simplex.vertices, simplex.value);
  }
  sort_filtration(K.simplices);
  return K;
}

std::vector<PersistenceDiagram> compute_diagrams(const FilteredComplex& K) {
  const size_t m = K.simplices.size();
  std::unordered_map<std::vector<int>, int, VectorHash> position;
  position.reserve(m);
  for (size_t j = 0; j < m; ++j) {
    const Simplex& s = K.simplices[j];
    if (s.vertices.empty()) throw std::invalid_argument("compute_diagrams: empty vertex set");
    if (!std::is_sorted(s.vertices.begin(), s.vertices.end()) ||
        std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end())
      throw std::invalid_argument("compute_diagrams: vertex sets must be sorted and duplicate-free");
    if (s.vertices.back() >= K.n_vertices || s.vertices.front() < 0)
      throw std::invalid_argument("compute_diagrams: vertex id out of range");
    if (!position.emplace(s.vertices, static_cast<int>(j)).second)
      throw std::invalid_argument("compute_diagrams: duplicate simplex");
    if (j > 0) {
      const Simplex& prev = K.simplices[j - 1];
      const bool ordered = prev.value < s.value ||
                           (prev.value == s.value &&
                            (prev.vertices.size() < s.vertices.size() ||
                             (prev.vertices.size() == s.vertices.size() && prev.vertices < s.vertices)));
      if (!ordered) throw std::invalid_argument("compute_diagrams: simplices not sorted by (value, dim, lex)");
    }
  }

  // Boundary columns over Z/2, shifted by one to make room for the empty
  // simplex (reduced homology: every vertex's boundary is the empty simplex).
  std::vector<std::vector<int>> columns(m + 1);
  std::vector<int> facet;
  for (size_t j = 0; j < m; ++j) {
    const Simplex& s = K.simplices[j];
    std::vector<int>& col = columns[j + 1];
    if (s.vertices.size() == 1) {
      col.push_back(0);
      continue;
    }
    facet.resize(s.vertices.size() - 1);
    for (size_t skip = 0; skip < s.vertices.size(); ++skip) {
      size_t w = 0;
      for (size_t i = 0; i < s.vertices.size(); ++i)
        if (i != skip) facet[w++] = s.vertices[i];
      auto it = position.find(facet);
      if (it == position.end()) throw std::invalid_argument("compute_diagrams: complex not closed under faces");
      if (K.simplices[it->second].value > s.value)
        throw std::invalid_argument("compute_diagrams: face value exceeds coface value");
      col.push_back(it->second + 1);
    }
    std::sort(col.begin(), col.end());
  }

  auto value_at = [&](int pos) { return pos == 0 ? 0.0 : K.simplices[pos - 1].value; };
  auto dim_at = [&](int pos) {
    return pos == 0 ? -1 : static_cast<int>(K.simplices[pos - 1].vertices.size()) - 1;
  };

  std::vector<int> pivot_owner(m + 1, -1);
  std::vector<std::pair<int, int>> pairs;  // (birth position, death position)
  std::vector<int> merged;
  for (size_t j = 0; j <= m; ++j) {
    std::vector<int>& col = columns[j];
    while (!col.empty()) {
      const int low = col.back();
      const int owner = pivot_owner[low];
      if (owner < 0) break;
      const std::vector<int>& other = columns[owner];
      merged.clear();
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                    std::back_inserter(merged));
      col.swap(merged);
    }
    if (!col.empty()) {
      pivot_owner[col.back()] = static_cast<int>(j);
      pairs.emplace_back(col.back(), static_cast<int>(j));
    }
  }

  // A creator (empty column) whose position is never claimed as a pivot row is
  // an essential class.  Degrees up to max_dim - 1 must all die: the terminal
  // complex is the full (max_dim)-skeleton, contractible through those degrees.
  for (size_t j = 0; j <= m; ++j) {
    if (!columns[j].empty() || pivot_owner[j] != -1) continue;
    const int degree = dim_at(static_cast<int>(j));
    if (degree >= 0 && degree <= K.max_dim - 1)
      throw std::invalid_argument(
          "compute_diagrams: essential class in reported degrees (filtration does not end contractible)");
  }

  std::vector<PersistenceDiagram> diagrams(static_cast<size_t>(std::max(K.max_dim, 1)));
  for (size_t deg = 0; deg < diagrams.size(); ++deg) diagrams[deg].degree = static_cast<int>(deg);
  std::vector<std::map<std::pair<double, double>, long long>> merged_points(diagrams.size());
  for (const auto& [birth_pos, death_pos] : pairs) {
    const int degree = dim_at(birth_pos);
    if (degree < 0 || degree >= static_cast<int>(diagrams.size())) continue;
    const double birth = value_at(birth_pos);
    const double death = value_at(death_pos);
    if (birth == death) continue;  // zero persistence: invisible to both metrics
    ++merged_points[static_cast<size_t>(degree)][{birth, death}];
  }
  for (size_t deg = 0; deg < diagrams.size(); ++deg)
    for (const auto& [bd, mult] : merged_points[deg])
      diagrams[deg].points.push_back({bd.first, bd.second, mult});
  return diagrams;
}

namespace {

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (Index i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

}  // namespace

PersistenceDiagram analytic_simplex_diagram(Filtration filtration, Index n, double nu_d, int degree) {
  if (n < 2) throw std::invalid_argument("analytic_simplex_diagram: need n >= 2");
  if (!(nu_d > 0)) throw std::invalid_argument("analytic_simplex_diagram: scale must be > 0");
  if (degree < 0 || degree > n - 2)
    throw std::invalid_argument("analytic_simplex_diagram: degree out of [0, n-2]");
  PersistenceDiagram diagram;
  diagram.degree = degree;
  if (filtration == Filtration::rips) {
    if (degree == 0)
      diagram.points.push_back({0.0, std::sqrt(2.0 * nu_d) / 2.0, static_cast<long long>(n - 1)});
    // degree >= 1: empty
  } else {
    const double N = degree;
    const double birth = std::sqrt(nu_d * N / (N + 1.0));
    const double death = std::sqrt(nu_d * (N + 1.0) / (N + 2.0));
    const long long mult = static_cast<long long>(std::llround(binomial(n - 1, degree + 1)));
    diagram.points.push_back({birth, death, mult});
  }
  return diagram;
}

PointCloud regular_simplex_cloud(Index n, double nu_d) {
  if (n < 2) throw std::invalid_argument("regular_simplex_cloud: need n >= 2");
  if (!(nu_d > 0)) throw std::invalid_argument("regular_simplex_cloud: scale must be > 0");
  PointCloud cloud;
  cloud.coords = std::sqrt(nu_d) * Matrix::Identity(n, n);
  cloud.essential_dim = n;
  return cloud;
}

bool diagrams_match(const PersistenceDiagram& computed, const PersistenceDiagram& expected,
                    double tol, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (computed.degree != expected.degree) return fail("degree mismatch");

  // Backtracking assignment of computed points to expected points within tol,
  // with multiplicities adding up exactly.  Distinct-point counts are tiny.
  std::vector<long long> remaining(expected.points.size());
  for (size_t e = 0; e < expected.points.size(); ++e) remaining[e] = expected.points[e].multiplicity;

  auto assign = [&](auto&& self, size_t c) -> bool {
    if (c == computed.points.size()) {
      for (long long r : remaining)
        if (r != 0) return false;
      return true;
    }
    const DiagramPoint& p = computed.points[c];
    for (size_t e = 0; e < expected.points.size(); ++e) {
      if (remaining[e] < p.multiplicity) continue;
      if (std::abs(p.birth - expected.points[e].birth) > tol) continue;
      if (std::abs(p.death - expected.points[e].death) > tol) continue;
      remaining[e] -= p.multiplicity;
      if (self(self, c + 1)) return true;
      remaining[e] += p.multiplicity;
    }
    return false;
  };
  if (!assign(assign, 0)) {
    std::string msg = "no tolerant multiset match; computed = {";
    char buf[96];
    for (const auto& p : computed.points) {
      std::snprintf(buf, sizeof buf, "(%.12g, %.12g)x%lld ", p.birth, p.death, p.multiplicity);
      msg += buf;
    }
    msg += "} expected = {";
    for (const auto& p : expected.points) {
      std::snprintf(buf, sizeof buf, "(%.12g, %.12g)x%lld ", p.birth, p.death, p.multiplicity);
      msg += buf;
    }
    msg += "}";
    return fail(msg);
  }
  return true;
}

double predicted_simplex_count(Index n, int max_hom_dim) {
  double total = 0;
  for (int k = 1; k <= max_hom_dim + 2; ++k) total += binomial(n, k);
  return total;
}

std::string diagrams_to_csv(const std::vector<PersistenceDiagram>& diagrams) {
  std::string out = "degree,birth,death,multiplicity\n";
  char buf[128];
  for (const auto& diagram : diagrams)
    for (const auto& p : diagram.points) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%lld\n", diagram.degree, p.birth, p.death,
                    p.multiplicity);
      out += buf;
    }
  return out;
}

void write_diagrams_csv(const std::vector<PersistenceDiagram>& diagrams, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_diagrams_csv: cannot open " + path);
  f << diagrams_to_csv(diagrams);
}

}  // namespace hdph
