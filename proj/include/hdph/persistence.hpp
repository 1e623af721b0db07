#pragma once

#include "hdph/pointcloud.hpp"

#include <string>
#include <vector>

namespace hdph {

// Radius-convention filtered complex: a simplex's value is the radius at which
// it enters (Rips: half its diameter; Cech: its minimum enclosing ball radius).
struct Simplex {
  double value = 0;
  std::vector<int> vertices;  // sorted ascending
};

struct FilteredComplex {
  Index n_vertices = 0;
  int max_dim = 0;  // largest simplex dimension stored (= max homology degree + 1)
  std::vector<Simplex> simplices;
};

struct DiagramPoint {
  double birth = 0;
  double death = 0;
  long long multiplicity = 1;
};

// Multiset of finite (birth, death) pairs of one homology degree.  Reduced
// homology with the filtration run to a contractible terminal complex leaves
// no infinite bars, so death < inf always holds for stored pairs.
struct PersistenceDiagram {
  int degree = 0;
  std::vector<DiagramPoint> points;
};

// All simplices of dimension <= max_hom_dim + 1, value = max pairwise distance / 2.
// Requires a symmetric zero-diagonal distance matrix and max_hom_dim <= n - 2.
FilteredComplex rips_complex(const Matrix& distances, int max_hom_dim);

// Ambient Cech complex: value = minimum enclosing ball radius of the simplex's points.
FilteredComplex cech_complex(const PointCloud& Z, int max_hom_dim);

// Exact minimum enclosing ball radius of <= 16 points (columns of `points`),
// by enumeration of boundary subsets with the circumcenter solved in each
// subset's affine hull; containment checked at relative tolerance 1e-9.
double meb_radius(const Matrix& points);

// Reduced persistent homology over Z/2 by standard column reduction on the
// boundary matrix augmented with the empty simplex.  Zero-persistence pairs are
// dropped; equal pairs merge into multiplicities.  Returns degrees 0..max_dim-1.
std::vector<PersistenceDiagram> compute_diagrams(const FilteredComplex& K);

enum class Filtration { rips, cech };

// Closed-form diagram of the regular (n-1)-simplex with squared edge length
// 2*nu_d.  Rips: degree 0 = {(0, sqrt(2 nu_d)/2)} with multiplicity n-1, higher
// degrees empty.  Cech: degree N = one point (sqrt(nu_d N/(N+1)), sqrt(nu_d (N+1)/(N+2)))
// with multiplicity C(n-1, N+1).
PersistenceDiagram analytic_simplex_diagram(Filtration filtration, Index n, double nu_d, int degree);

// Vertices sqrt(nu_d) * e_i in R^n: the exact coordinates realizing the
// regular simplex with pairwise distances sqrt(2 nu_d).
PointCloud regular_simplex_cloud(Index n, double nu_d);

// Tolerant multiset equality: every computed point must sit within `tol`
// (in both coordinates) of an expected point, with multiplicities adding up
// exactly.  Used to compare reduced diagrams against closed-form oracles.
bool diagrams_match(const PersistenceDiagram& computed, const PersistenceDiagram& expected,
                    double tol, std::string* why = nullptr);

// Predicted number of simplices (sum of C(n, k) for k = 1 .. max_hom_dim + 2),
// for resource guards; computed in doubles to survive large n.
double predicted_simplex_count(Index n, int max_hom_dim);

// CSV with header "degree,birth,death,multiplicity", one row per distinct pair.
std::string diagrams_to_csv(const std::vector<PersistenceDiagram>& diagrams);
void write_diagrams_csv(const std::vector<PersistenceDiagram>& diagrams, const std::string& path);

}  // namespace hdph
