#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "subcorr/error.hpp"
#include "subcorr/model.hpp"
#include "subcorr/theory.hpp"

using namespace subcorr;
namespace th = subcorr::theory;

TEST(HypergeomPmf, MatchesSubsetEnumeration) {
  for (auto [n, s] : {std::pair{4, 2}, {6, 3}, {8, 5}, {10, 4}}) {
    const auto law = oracle::overlap_law_by_enumeration(n, s);
    for (int t = 0; t <= s; ++t) EXPECT_NEAR(th::hypergeom_pmf(n, s, t), law[t], 1e-12);
  }
  EXPECT_NEAR(th::hypergeom_pmf(4, 2, 1), 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(th::hypergeom_pmf(4, 2, 0), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(th::hypergeom_pmf(4, 2, 2), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(th::hypergeom_pmf(5, 5, 5), 1.0, 1e-12);
  EXPECT_EQ(th::hypergeom_pmf(10, 7, 2), 0.0);
}

TEST(HypergeomPmf, SumsToOneAtScale) {
  for (auto [n, s] : {std::pair{50, 25}, {1000, 300}, {10000, 100}}) {
    double total = 0.0;
    for (int t = std::max(0, 2 * s - n); t <= s; ++t) total += th::hypergeom_pmf(n, s, t);
    EXPECT_NEAR(total, 1.0, 1e-12) << n << "," << s;
  }
  EXPECT_THROW(th::hypergeom_pmf(5, 6, 1), Error);
  EXPECT_THROW(th::hypergeom_pmf(5, 3, 4), Error);
}

TEST(HypergeomTail, DominatesExactTails) {
  for (double eps : {0.01, 0.1, 0.3, 0.5}) {
    const int n = 50, s = 25;
    const double mean = s * s / static_cast<double>(n);
    double up = 0.0, lo = 0.0;
    for (int t = 0; t <= s; ++t) {
      const double p = th::hypergeom_pmf(n, s, t);
      if (t >= (1 + eps) * mean) up += p;
      if (t <= (1 - eps) * mean) lo += p;
    }
    const auto b = th::hypergeom_tail_bounds(n, s, eps);
    EXPECT_LE(up, b.upper);
    EXPECT_LE(lo, b.lower);
  }
}

TEST(HypergeomTail, ClosedFormAndMonotone) {
  const auto b = th::hypergeom_tail_bounds(100, 10, 0.5);
  EXPECT_NEAR(b.upper, std::min(std::exp(-0.25 * 100 / (2.5 * 100)), std::exp(-0.25 * 1000 / 1e4)),
              1e-15);
  EXPECT_NEAR(b.lower, std::min(std::exp(-0.25 * 100 / 200.0), std::exp(-0.25 * 1000 / 1e4)),
              1e-15);
  double prev_up = 1.0, prev_lo = 1.0;
  for (double eps = 0.5; eps < 50; eps *= 2) {
    const auto t = th::hypergeom_tail_bounds(100, 10, eps);
    EXPECT_LT(t.upper, prev_up);
    EXPECT_LT(t.lower, prev_lo);
    prev_up = t.upper;
    prev_lo = t.lower;
  }
  EXPECT_LT(prev_up, 1e-10);
}

TEST(Mgf, ClosedForms) {
  EXPECT_EQ(th::mgf_overlap(0.0), 1.0);
  EXPECT_NEAR(th::mgf_overlap(0.3), 1.04828, 1e-5);
  EXPECT_EQ(th::mgf_mse(0.0), 1.0);
  EXPECT_NEAR(th::mgf_mse(1.5), 0.5, 1e-15);
  EXPECT_THROW(th::mgf_overlap(1.0), Error);
  EXPECT_THROW(th::mgf_overlap(-1.2), Error);
  EXPECT_THROW(th::mgf_mse(-0.5), Error);
}

TEST(Mgf, AgreeWithMonteCarlo) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  const int trials = 200000;
  auto check = [&](auto fn, double target) {
    double mean = 0.0, m2 = 0.0;
    for (int i = 1; i <= trials; ++i) {
      const double x = normal(rng), y = normal(rng);
      const double v = fn(x, y);
      const double d = v - mean;
      mean += d / i;
      m2 += d * (v - mean);
    }
    const double se = std::sqrt(m2 / (trials - 1) / trials);
    EXPECT_NEAR(mean, target, 4 * se);
  };
  for (double lambda : {0.1, 0.3})
    check([&](double x, double y) { return std::exp(lambda * x * y); }, th::mgf_overlap(lambda));
  for (double lambda : {0.5, 1.5, 5.0})
    check([&](double x, double y) { return std::exp(-lambda / 2 * (x - y) * (x - y)); },
          th::mgf_mse(lambda));
  check([](double x, double y) { return th::likelihood_ratio(x, y, 0.5); }, 1.0);
}

TEST(LikelihoodRatio, Values) {
  EXPECT_NEAR(th::likelihood_ratio(0, 0, 0.6), 1.0 / std::sqrt(1 - 0.36), 1e-15);
  EXPECT_NEAR(th::likelihood_ratio(1, 1, 0.5), std::exp(1.0 / 3.0) / std::sqrt(0.75), 1e-12);
  EXPECT_GT(th::likelihood_ratio(8, -8, 0.9), 0.0);
  EXPECT_THROW(th::likelihood_ratio(0, 0, 1.0), Error);
  EXPECT_THROW(th::likelihood_ratio(0, 0, 0.0), Error);
}

namespace {

std::vector<Vertex> all_vertices(int n) {
  std::vector<Vertex> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(Digraph, IdenticalPermutationsGiveUnitCycles) {
  const auto pi = Permutation::random(6, 1);
  const auto all = all_vertices(6);
  const auto d = th::build_digraph(pi, pi, all, all);
  EXPECT_EQ(d.nodes.size(), 30u);
  const auto dec = th::decompose(d);
  EXPECT_TRUE(dec.paths.empty());
  ASSERT_EQ(dec.cycles.size(), 15u);
  for (const auto& c : dec.cycles) {
    EXPECT_EQ(c.side1_count, 1);
    EXPECT_EQ(c.nodes.size(), 2u);
  }
  EXPECT_EQ(th::core_set(pi, pi, all, all).vertices, all);
}

TEST(Digraph, DisjointCommonSetsGiveOnlyPaths) {
  // pi keeps {0,1} inside idx2 and pit keeps {2,3}; no side-1 pair is shared.
  const Permutation pi({0, 1, 4, 5, 2, 3});
  const Permutation pit({4, 5, 2, 3, 0, 1});
  const std::vector<Vertex> idx1 = {0, 1, 2, 3}, idx2 = {0, 1, 2, 3};
  const auto d = th::build_digraph(pi, pit, idx1, idx2);
  const auto dec = th::decompose(d);
  EXPECT_TRUE(dec.cycles.empty());
  EXPECT_EQ(dec.paths.size(), 2u);
  for (const auto& p : dec.paths) EXPECT_EQ(p.nodes.size(), 2u);
  EXPECT_TRUE(th::core_set(pi, pit, idx1, idx2).vertices.empty());
}

TEST(Digraph, HandChosenStructureMatchesBfs) {
  // n=6, s=4: a 3-cycle of vertices under pit relative to pi.
  const Permutation pi({0, 1, 2, 3, 4, 5});
  const Permutation pit({1, 2, 0, 3, 5, 4});
  const std::vector<Vertex> idx1 = {0, 1, 2, 3}, idx2 = {0, 1, 2, 3};
  const auto d = th::build_digraph(pi, pit, idx1, idx2);
  const auto dec = th::decompose(d);
  const auto bfs = oracle::components_by_bfs(d);
  EXPECT_EQ(dec.paths.size() + dec.cycles.size(), bfs.size());
  std::size_t bfs_cycles = 0;
  for (const auto& c : bfs) bfs_cycles += c.cycle;
  EXPECT_EQ(dec.cycles.size(), bfs_cycles);
  // {0,1,2} agree as a set, vertex 3 is fixed by both.
  EXPECT_EQ(th::core_set(pi, pit, idx1, idx2).vertices, (std::vector<Vertex>{0, 1, 2, 3}));
}

TEST(Digraph, RandomInstancesPartitionAndDegreeBound) {
  for (int i = 0; i < 500; ++i) {
    const int n = 6 + i % 5, s = 3 + i % 4;
    const auto pi = Permutation::random(n, 1000 + i);
    const auto pit = Permutation::random(n, 2000 + i);
    const auto idx1 = sample_subset(n, s, 3000 + i);
    const auto idx2 = sample_subset(n, s, 4000 + i);
    const auto d = th::build_digraph(pi, pit, idx1, idx2);
    std::vector<int> degree(d.nodes.size(), 0);
    for (const auto& links : {d.arcs, d.merges})
      for (const auto& [a, b] : links) {
        ++degree[a];
        ++degree[b];
        EXPECT_EQ(d.nodes[a].side, th::Side::One);
        EXPECT_EQ(d.nodes[b].side, th::Side::Two);
      }
    for (int deg : degree) EXPECT_LE(deg, 2);

    const auto dec = th::decompose(d);
    std::set<int> covered;
    std::size_t total = 0;
    for (const auto* group : {&dec.paths, &dec.cycles})
      for (const auto& c : *group) {
        total += c.nodes.size();
        covered.insert(c.nodes.begin(), c.nodes.end());
      }
    EXPECT_EQ(total, d.nodes.size());
    EXPECT_EQ(covered.size(), d.nodes.size());

    for (const auto& c : dec.cycles) {
      int side2 = 0;
      for (int v : c.nodes) side2 += d.nodes[v].side == th::Side::Two;
      EXPECT_EQ(c.side1_count, side2);
    }

    const auto bfs = oracle::components_by_bfs(d);
    std::set<std::set<int>> want_cycles, got_cycles;
    for (const auto& c : bfs)
      if (c.cycle) want_cycles.insert(c.nodes);
    for (const auto& c : dec.cycles) got_cycles.insert(std::set<int>(c.nodes.begin(), c.nodes.end()));
    EXPECT_EQ(got_cycles, want_cycles);
  }
}

TEST(CoreSet, EqualsExhaustiveArgmax) {
  for (int i = 0; i < 300; ++i) {
    const int n = 4 + i % 5;
    const int s = 1 + i % std::min(n, 5);
    const auto pi = Permutation::random(n, 5000 + i);
    const auto pit = Permutation::random(n, 6000 + i);
    const auto idx1 = sample_subset(n, s, 7000 + i);
    const auto idx2 = sample_subset(n, s, 8000 + i);
    EXPECT_EQ(th::core_set(pi, pit, idx1, idx2).vertices,
              oracle::max_agreeing_set(pi, pit, idx1, idx2))
        << "instance " << i;
  }
}

TEST(CoreSet, ImagesAgreeAndStayInSample) {
  for (int i = 0; i < 200; ++i) {
    const auto pi = Permutation::random(12, 9000 + i);
    const auto pit = Permutation::random(12, 9500 + i);
    const auto idx1 = sample_subset(12, 8, 10000 + i);
    const auto idx2 = sample_subset(12, 8, 11000 + i);
    std::set<Vertex> a, b;
    for (Vertex v : th::core_set(pi, pit, idx1, idx2).vertices) {
      a.insert(pi(idx1[v]));
      b.insert(pit(idx1[v]));
    }
    EXPECT_EQ(a, b);
    for (Vertex w : a) EXPECT_TRUE(std::binary_search(idx2.begin(), idx2.end(), w));
  }
}

TEST(ComponentExpectation, TargetsAndMonteCarlo) {
  EXPECT_EQ(th::component_expectation(th::PathKind{3}, 0.5), 1.0);
  EXPECT_NEAR(th::component_expectation(th::CycleKind{1}, 0.5), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(th::component_expectation(th::CycleKind{2}, 0.5), 1.0 / (1 - 0.0625), 1e-15);

  for (double rho : {0.3, 0.5})
    for (const th::ComponentKind& kind :
         {th::ComponentKind{th::PathKind{2}}, th::ComponentKind{th::CycleKind{2}},
          th::ComponentKind{th::CycleKind{3}}}) {
      const auto est = th::mc_component_expectation(kind, rho, 100000, 77);
      EXPECT_EQ(est.trials, 100000u);
      EXPECT_NEAR(est.estimate, th::component_expectation(kind, rho), 4 * est.std_error);
    }
  EXPECT_THROW(th::mc_component_expectation(th::PathKind{2}, 0.5, 999, 1), Error);
}

TEST(ComponentExpectation, IndependentOfWorkerCount) {
  const auto a = th::mc_component_expectation(th::CycleKind{1}, 0.4, 30000, 5, 1);
  const auto b = th::mc_component_expectation(th::CycleKind{1}, 0.4, 30000, 5, 3);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(SampleComplexity, LimitsAndMonotonicity) {
  EXPECT_NEAR(th::sample_complexity_boundary(50, 1 - 1e-12, 2.0), std::sqrt(100.0), 1e-9);
  const double rho = std::sqrt(1 - 1.0 / 50);
  EXPECT_NEAR(th::sample_complexity_boundary(50, rho, 1.0), std::sqrt(50.0), 1e-9);
  double prev = INFINITY;
  for (double r = 0.05; r < 1; r += 0.05) {
    const double b = th::sample_complexity_boundary(100, r, 1.0);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(CoreSetTail, BoundsAndVacuousCases) {
  const auto zero = th::core_set_tail_check(10, 4, 0, 2000, 1);
  EXPECT_EQ(zero.bound, 1.0);
  EXPECT_FALSE(zero.violated);
  const auto full = th::core_set_tail_check(6, 6, 1, 2000, 1);
  EXPECT_EQ(full.bound, 1.0);
  EXPECT_FALSE(full.violated);
  const auto two = th::core_set_tail_check(10, 4, 2, 20000, 3);
  EXPECT_NEAR(two.bound, std::pow(0.4, 4), 1e-15);
  EXPECT_FALSE(two.violated);
  EXPECT_THROW(th::core_set_tail_check(10, 4, 5, 2000, 1), Error);
}
