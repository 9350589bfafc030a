#pragma once

#include <cstdint>

#include "subcorr/model.hpp"
#include "subcorr/similarity.hpp"

namespace subcorr {

struct ExactBudget {
  std::uint64_t max_evaluations = 100'000'000;
};

struct ExactResult {
  double score = 0.0;
  PartialInjection argmax;
  std::uint64_t evaluations = 0;
};

// binom(s, m)^2 * m!, saturating at UINT64_MAX.
std::uint64_t exact_evaluation_count(int s, int m);

// Maximum similarity score over all injections of size m from sub1 to sub2.
//
// Domain subsets, image subsets and pairings are each enumerated in
// lexicographic order and a candidate replaces the incumbent only when it
// scores strictly higher, so among tied mappings the lexicographically
// smallest (domain, image, pairing) wins. The returned argmax has an
// ascending domain; image[k] is the partner of domain[k].
ExactResult enumerate_max_score(const WeightedGraph& sub1, const WeightedGraph& sub2,
                                int m, const SimilarityKernel& f,
                                ExactBudget budget = {});

// binom(m, 2) * rho / 2, the overlap-statistic threshold.
double threshold_overlap(int m, double rho);

// 2 * binom(m, 2) * (rho - 1), the mean-squared-error threshold.
double threshold_mse(int m, double rho);

enum class Decision { RejectNull, AcceptNull };

const char* to_string(Decision d);

// Reject when statistic >= tau: the boundary counts as a Type I event.
inline Decision decide(double statistic, double tau) {
  return statistic >= tau ? Decision::RejectNull : Decision::AcceptNull;
}

}  // namespace subcorr
