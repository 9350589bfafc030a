#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "subcorr/model.hpp"

namespace subcorr::theory {

// P(|S| = t) for the overlap of two independent uniform s-subsets of [n]
// (equivalently of pi(V1) and V2 under a uniform permutation), HG(n, s, s).
double hypergeom_pmf(int n, int s, int t);

struct TailBounds {
  double upper;  // bounds P(eta >= (1 + eps) s^2 / n)
  double lower;  // bounds P(eta <= (1 - eps) s^2 / n)
};

TailBounds hypergeom_tail_bounds(int n, int s, double epsilon);

// E[exp(lambda X Y)] for independent standard normals, |lambda| < 1.
double mgf_overlap(double lambda);

// E[exp(-(lambda / 2) (X - Y)^2)] for independent standard normals,
// lambda > -1/2.
double mgf_mse(double lambda);

// Density ratio of a rho-correlated standard normal pair to an independent
// one, evaluated at (a, b).
double likelihood_ratio(double a, double b, double rho);

// ---------------------------------------------------------------------------
// Correlated functional digraph of two bijections pi, pit on [n], restricted
// to the sampled vertex lists idx1 (side 1) and idx2 (side 2).
//
// Nodes are unordered parent-vertex pairs on each side. Every side-1 pair e
// inside the common set of pi gets an arc e -> pi(e); every side-1 pair e
// inside the common set of pit is merged with pit(e). Treating merges as
// undirected links gives a multigraph of maximum degree two.

enum class Side { One, Two };

struct EdgeNode {
  Side side;
  Vertex a;  // a < b, parent ids
  Vertex b;
  bool operator==(const EdgeNode&) const = default;
};

struct FunctionalDigraph {
  std::vector<EdgeNode> nodes;
  std::vector<std::pair<int, int>> arcs;    // (side-1 node, side-2 node) via pi
  std::vector<std::pair<int, int>> merges;  // (side-1 node, side-2 node) via pit
  std::vector<Vertex> idx1;
  std::vector<Vertex> idx2;
};

FunctionalDigraph build_digraph(const Permutation& pi, const Permutation& pit,
                                std::span<const Vertex> idx1, std::span<const Vertex> idx2);

struct Component {
  std::vector<int> nodes;  // walk order
  int side1_count = 0;     // the cycle length |C| for cycles
};

struct Decomposition {
  std::vector<Component> paths;
  std::vector<Component> cycles;
};

// Splits the digraph into its connected components (union-find over both
// link kinds). Throws internal-error if some node has degree above two.
Decomposition decompose(const FunctionalDigraph& d);

// Local side-1 indices covered by the side-1 edge-nodes of all cycles.
std::vector<Vertex> cycle_vertex_set(const FunctionalDigraph& d, const Decomposition& dec);

struct CoreSet {
  std::vector<Vertex> vertices;  // ascending local indices into idx1
};

// Largest set of sampled side-1 vertices on which pi and pit have the same
// image set inside idx2. This is the cycle vertex set, except when exactly
// one vertex agrees: a single vertex spans no edge, so it is added directly.
CoreSet core_set(const Permutation& pi, const Permutation& pit,
                 std::span<const Vertex> idx1, std::span<const Vertex> idx2);

// ---------------------------------------------------------------------------
// Monte Carlo checks.

struct PathKind {
  int k;  // number of likelihood-ratio factors along an open chain
};
struct CycleKind {
  int j;  // cycle with 2j likelihood-ratio factors, |C| = j
};
using ComponentKind = std::variant<PathKind, CycleKind>;

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

// Mean of the likelihood-ratio product along a chain of iid standard
// normals: l(B0,B1)...l(B_{k-1},B_k) for paths, l(B1,B2)...l(B_{2j},B1) for
// cycles. Trials run in fixed blocks with derived seeds, so the result only
// depends on (seed, trials).
McEstimate mc_component_expectation(const ComponentKind& kind, double rho,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned workers = 1);

// Closed-form targets: 1 for paths, 1 / (1 - rho^{2j}) for cycles.
double component_expectation(const ComponentKind& kind, double rho);

// sqrt(constant * max(n log n / log(1 / (1 - rho^2)), n)).
double sample_complexity_boundary(int n, double rho, double constant);

struct TailCheck {
  double frequency = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool violated = false;
};

// Empirical P(|I*| = t) over independent uniform (pi, pit, idx1, idx2),
// against (s/n)^{2t}. Violation means frequency > bound + 3 SE.
TailCheck core_set_tail_check(int n, int s, int t, std::uint64_t trials,
                              std::uint64_t seed);

}  // namespace subcorr::theory
