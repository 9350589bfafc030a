#pragma once

#include <cstdint>
#include <vector>

#include "subcorr/exact.hpp"
#include "subcorr/model.hpp"
#include "subcorr/similarity.hpp"

namespace subcorr {

struct AlgoParams {
  int k1 = 4;       // clique size
  int k2 = 3;       // cliques merged into the seed
  int n1 = 10000;   // sampled cliques
  int n2 = 500;     // cliques kept after ranking
  int m = 12;       // final mapping size
  SimilarityKernel f = SimilarityKernel::neg_half_sq_diff();
  double tau = 0.0;
  std::uint64_t seed = 0;
};

// Throws invalid-parameter unless the parameters make sense for samples of
// s vertices.
void validate(const AlgoParams& params, int s);

struct CliqueMatch {
  std::vector<Vertex> vertex_set;  // ascending
  PartialInjection mapping;        // domain == vertex_set
  double score = 0.0;
  int generation_index = 0;
};

struct SeedMapping {
  PartialInjection pi0;  // domain ascending
  double avg_score = 0.0;
  std::vector<int> members;  // positions in the ranked list, ascending
  int k2_used = 0;           // < requested k2 when the fallback kicked in
};

// Best injection of one vertex set of sub1 into sub2, searched over ordered
// tuples of distinct sub2 vertices. Ties go to the lexicographically smallest
// image tuple. The branch-and-bound only discards tuples whose upper bound is
// strictly below the incumbent, so the result equals full enumeration.
CliqueMatch best_clique_injection(const WeightedGraph& sub1, const WeightedGraph& sub2,
                                  std::span<const Vertex> vertex_set,
                                  const SimilarityKernel& f);

// n1 distinct uniformly drawn k1-subsets of sub1, each with its optimal
// injection, in generation order.
std::vector<CliqueMatch> match_cliques(const WeightedGraph& sub1, const WeightedGraph& sub2,
                                       int k1, int n1, const SimilarityKernel& f,
                                       std::uint64_t seed);

// The n2 highest-scoring matches; equal scores keep generation order.
std::vector<CliqueMatch> select_top(std::vector<CliqueMatch> matches, int n2);

// True when two clique injections agree on shared vertices and their union
// is still injective.
bool compatible(const CliqueMatch& a, const CliqueMatch& b);

// Best compatible union of k2 ranked cliques by average edge score over the
// union. Falls back to k2 - 1, ... , 1 when no compatible k2-set exists.
SeedMapping find_seed(const std::vector<CliqueMatch>& top, int k2,
                      const SimilarityKernel& f, const WeightedGraph& sub1,
                      const WeightedGraph& sub2);

// Greedily appends the (v1, v2) pair with the largest total kernel value
// against the current mapping until it has m pairs. Ties go to the smallest
// (v1, v2). The seed is kept as a positional prefix.
PartialInjection extend_mapping(const SeedMapping& seed, const WeightedGraph& sub1,
                                const WeightedGraph& sub2, int m,
                                const SimilarityKernel& f);

struct DetectionResult {
  double statistic = 0.0;
  Decision decision = Decision::AcceptNull;
  PartialInjection mapping;
  SeedMapping seed;
};

DetectionResult detect(const WeightedGraph& sub1, const WeightedGraph& sub2,
                       const AlgoParams& params);

}  // namespace subcorr
