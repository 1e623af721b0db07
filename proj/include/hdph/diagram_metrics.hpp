#pragma once

#include "hdph/persistence.hpp"

#include <stdexcept>
#include <string>

namespace hdph {

// Raised when an operation would exceed an explicit resource cap
// (expanded matching nodes, predicted simplex counts, ...).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiagramDistanceResult {
  double value = 0;      // meaningful only when !is_inf
  bool is_inf = false;   // infinity kept as a flag, never a sentinel float

  enum class WitnessKind { none, point_point, point_diagonal };
  WitnessKind witness_kind = WitnessKind::none;
  DiagramPoint witness_a;  // point of the first diagram (or the off-diagonal point)
  DiagramPoint witness_b;  // matched point of the second diagram (unset for diagonal)

  double finite_or(double if_inf) const { return is_inf ? if_inf : value; }
};

// Exact bottleneck distance between diagonal-augmented diagrams: candidate
// values are all pairwise L-inf costs plus all half-persistences; a binary
// search over the sorted candidates finds the smallest threshold admitting a
// perfect matching (bipartite feasibility via augmenting paths).
DiagramDistanceResult bottleneck_distance(const PersistenceDiagram& D1, const PersistenceDiagram& D2);

// Reference implementation: exhaustive enumeration over all diagonal-augmented
// matchings.  Exponential; intended for cross-validation on small diagrams.
DiagramDistanceResult bottleneck_distance_bruteforce(const PersistenceDiagram& D1,
                                                     const PersistenceDiagram& D2);

// L-inf Hausdorff distance between the diagrams' point sets (multiplicities
// ignored).  include_diagonal augments both sides with the diagonal (distance
// to diagonal = persistence / 2), realizing the barred-diagram reading; the
// raw reading keeps the conventions d_H(A, empty) = inf for A nonempty and
// d_H(empty, empty) = 0.
DiagramDistanceResult hausdorff_distance(const PersistenceDiagram& D1, const PersistenceDiagram& D2,
                                         bool include_diagonal);

// max (death - birth) over pairs; 0 for the empty diagram.
double max_persistence(const PersistenceDiagram& D);

// max (death - birth) / death over pairs; 0 for the empty diagram.
double max_relative_persistence(const PersistenceDiagram& D);

// JSON record {degree, metric, value | "inf", witness?} as a serialized string.
std::string metric_record_json(const DiagramDistanceResult& result, int degree,
                               const std::string& metric);

}  // namespace hdph
