#include "hdph/diagram_metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace hdph {
namespace {

constexpr long long kMaxExpandedPoints = 10'000;

std::vector<DiagramPoint> expand(const PersistenceDiagram& D) {
  long long total = 0;
  for (const auto& p : D.points) {
    if (p.multiplicity < 1) throw std::invalid_argument("diagram metrics: multiplicity must be >= 1");
    total += p.multiplicity;
  }
  if (total > kMaxExpandedPoints)
    throw ResourceError("diagram metrics: diagram expands to " + std::to_string(total) +
                        " points, beyond the 10^4 matching cap");
  std::vector<DiagramPoint> out;
  out.reserve(static_cast<size_t>(total));
  for (const auto& p : D.points)
    for (long long c = 0; c < p.multiplicity; ++c) out.push_back({p.birth, p.death, 1});
  return out;
}

double linf(const DiagramPoint& a, const DiagramPoint& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diag_cost(const DiagramPoint& p) { return (p.death - p.birth) / 2.0; }

// Kuhn augmenting-path matching restricted to "mandatory" left nodes: returns
// whether every left node in `left_ids` can be matched into the right side
// along edges with cost <= t.
bool saturates(const std::vector<int>& left_ids, const std::vector<DiagramPoint>& left,
               const std::vector<DiagramPoint>& right, double t) {
  std::vector<int> match_right(right.size(), -1);
  std::vector<char> visited;
  auto try_augment = [&](auto&& self, int u) -> bool {
    for (size_t v = 0; v < right.size(); ++v) {
      if (visited[v] || linf(left[u], right[v]) > t) continue;
      visited[v] = 1;
      if (match_right[v] < 0 || self(self, match_right[v])) {
        match_right[v] = u;
        return true;
      }
    }
    return false;
  };
  for (int u : left_ids) {
    visited.assign(right.size(), 0);
    if (!try_augment(try_augment, u)) return false;
  }
  return true;
}

// Feasibility of the diagonal-augmented perfect matching at threshold t: every
// point with persistence/2 > t must be matched to a real partner at cost <= t.
// Points within persistence/2 <= t can always fall back to their own diagonal
// projection, and surplus diagonal mass pairs with itself at zero cost, so the
// two one-sided saturation checks are exactly the perfect-matching condition.
bool feasible(const std::vector<DiagramPoint>& u, const std::vector<DiagramPoint>& v, double t) {
  std::vector<int> mandatory;
  for (size_t i = 0; i < u.size(); ++i)
    if (diag_cost(u[i]) > t) mandatory.push_back(static_cast<int>(i));
  if (!saturates(mandatory, u, v, t)) return false;
  mandatory.clear();
  for (size_t j = 0; j < v.size(); ++j)
    if (diag_cost(v[j]) > t) mandatory.push_back(static_cast<int>(j));
  return saturates(mandatory, v, u, t);
}

void check_same_degree(const PersistenceDiagram& D1, const PersistenceDiagram& D2) {
  if (D1.degree != D2.degree) throw std::invalid_argument("diagram metrics: degree mismatch");
}

}  // namespace

DiagramDistanceResult bottleneck_distance(const PersistenceDiagram& D1, const PersistenceDiagram& D2) {
  check_same_degree(D1, D2);
  const std::vector<DiagramPoint> u = expand(D1);
  const std::vector<DiagramPoint> v = expand(D2);

  DiagramDistanceResult result;
  if (u.empty() && v.empty()) return result;

  struct Candidate {
    double value;
    DiagramPoint a, b;
    bool diagonal;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(u.size() * v.size() + u.size() + v.size());
  for (const auto& p : u)
    for (const auto& q : v) candidates.push_back({linf(p, q), p, q, false});
  for (const auto& p : u) candidates.push_back({diag_cost(p), p, {}, true});
  for (const auto& q : v) candidates.push_back({diag_cost(q), q, {}, true});
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.value < b.value; });

  size_t lo = 0, hi = candidates.size() - 1;  // invariant: hi is feasible
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (feasible(u, v, candidates[mid].value))
      hi = mid;
    else
      lo = mid + 1;
  }

  const Candidate& best = candidates[lo];
  result.value = best.value;
  result.witness_kind = best.diagonal ? DiagramDistanceResult::WitnessKind::point_diagonal
                                      : DiagramDistanceResult::WitnessKind::point_point;
  result.witness_a = best.a;
  result.witness_b = best.b;
  return result;
}

DiagramDistanceResult bottleneck_distance_bruteforce(const PersistenceDiagram& D1,
                                                     const PersistenceDiagram& D2) {
  check_same_degree(D1, D2);
  const std::vector<DiagramPoint> u = expand(D1);
  const std::vector<DiagramPoint> v = expand(D2);

  double best = std::numeric_limits<double>::infinity();
  std::vector<char> used(v.size(), 0);
  // Each off-diagonal point of D1 goes to a point of D2 or to the diagonal;
  // leftover points of D2 go to the diagonal.
  auto recurse = [&](auto&& self, size_t i, double cost_so_far) -> void {
    if (cost_so_far >= best) return;
    if (i == u.size()) {
      double cost = cost_so_far;
      for (size_t j = 0; j < v.size(); ++j)
        if (!used[j]) cost = std::max(cost, diag_cost(v[j]));
      best = std::min(best, cost);
      return;
    }
    for (size_t j = 0; j < v.size(); ++j) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, std::max(cost_so_far, linf(u[i], v[j])));
      used[j] = 0;
    }
    self(self, i + 1, std::max(cost_so_far, diag_cost(u[i])));
  };
  recurse(recurse, 0, 0.0);

  DiagramDistanceResult result;
  result.value = (u.empty() && v.empty()) ? 0.0 : best;
  return result;
}

DiagramDistanceResult hausdorff_distance(const PersistenceDiagram& D1, const PersistenceDiagram& D2,
                                         bool include_diagonal) {
  check_same_degree(D1, D2);
  // Multiplicity-insensitive: work with the distinct points only.
  const std::vector<DiagramPoint>& a = D1.points;
  const std::vector<DiagramPoint>& b = D2.points;

  DiagramDistanceResult result;
  if (!include_diagonal) {
    if (a.empty() && b.empty()) return result;  // 0
    if (a.empty() || b.empty()) {
      result.is_inf = true;
      return result;
    }
  }

  auto directed = [&](const std::vector<DiagramPoint>& from, const std::vector<DiagramPoint>& to,
                      DiagramPoint& worst_point, DiagramPoint& nearest, bool& nearest_is_diag) {
    double worst = 0;
    for (const auto& p : from) {
      double nearest_cost = std::numeric_limits<double>::infinity();
      DiagramPoint arg{};
      bool is_diag = false;
      for (const auto& q : to) {
        const double c = linf(p, q);
        if (c < nearest_cost) { nearest_cost = c; arg = q; is_diag = false; }
      }
      if (include_diagonal && diag_cost(p) < nearest_cost) {
        nearest_cost = diag_cost(p);
        is_diag = true;
      }
      if (nearest_cost > worst) {
        worst = nearest_cost;
        worst_point = p;
        nearest = arg;
        nearest_is_diag = is_diag;
      }
    }
    return worst;
  };

  DiagramPoint wp1{}, np1{}, wp2{}, np2{};
  bool diag1 = false, diag2 = false;
  const double d12 = directed(a, b, wp1, np1, diag1);
  const double d21 = directed(b, a, wp2, np2, diag2);
  result.value = std::max(d12, d21);
  if (!a.empty() || !b.empty()) {
    const bool first = d12 >= d21;
    result.witness_kind = (first ? diag1 : diag2) ? DiagramDistanceResult::WitnessKind::point_diagonal
                                                  : DiagramDistanceResult::WitnessKind::point_point;
    result.witness_a = first ? wp1 : wp2;
    result.witness_b = first ? np1 : np2;
  }
  return result;
}

double max_persistence(const PersistenceDiagram& D) {
  double m = 0;
  for (const auto& p : D.points) m = std::max(m, p.death - p.birth);
  return m;
}

double max_relative_persistence(const PersistenceDiagram& D) {
  double m = 0;
  for (const auto& p : D.points) {
    if (!(p.death > 0)) throw std::invalid_argument("max_relative_persistence: pair with death <= 0");
    m = std::max(m, (p.death - p.birth) / p.death);
  }
  return m;
}

std::string metric_record_json(const DiagramDistanceResult& result, int degree,
                               const std::string& metric) {
  nlohmann::json j;
  j["degree"] = degree;
  j["metric"] = metric;
  if (result.is_inf)
    j["value"] = "inf";
  else
    j["value"] = result.value;
  if (result.witness_kind != DiagramDistanceResult::WitnessKind::none) {
    nlohmann::json w;
    w["kind"] = result.witness_kind == DiagramDistanceResult::WitnessKind::point_diagonal
                    ? "point_diagonal"
                    : "point_point";
    w["a"] = {result.witness_a.birth, result.witness_a.death};
    if (result.witness_kind == DiagramDistanceResult::WitnessKind::point_point)
      w["b"] = {result.witness_b.birth, result.witness_b.death};
    j["witness"] = w;
  }
  return j.dump();
}

}  // namespace hdph
