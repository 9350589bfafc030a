#include "subcorr/clique_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "subcorr/error.hpp"
#include "subcorr/rng.hpp"

namespace subcorr {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxClique = 16;

double binom2(std::size_t n) { return 0.5 * static_cast<double>(n) * (n - 1.0); }

double binom_real(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0)));
}

// Exhaustive search for the best injection of a fixed k-vertex set into
// sub2. Vertex i of the set is assigned at level i; at each level the terms
// f(beta_{v_i v_j}, beta_{t_i t_j}) for i < j become known. Unassigned terms
// are bounded by per-row maxima of the kernel tables.
class CliqueSearch {
 public:
  CliqueSearch(const WeightedGraph& sub1, const WeightedGraph& sub2,
               std::span<const Vertex> vs, const SimilarityKernel& f)
      : k_(static_cast<int>(vs.size())), s_(sub2.size()) {
    const int pairs = k_ * (k_ - 1) / 2;
    const auto ss = static_cast<std::size_t>(s_);
    table_.assign(static_cast<std::size_t>(pairs) * ss * ss, kNegInf);
    rowmax_.assign(static_cast<std::size_t>(pairs) * ss, kNegInf);
    gmax_.assign(pairs, kNegInf);
    for (int j = 1; j < k_; ++j) {
      for (int i = 0; i < j; ++i) {
        const int p = pair_index(i, j);
        const double x = sub1.weight(vs[i], vs[j]);
        double* t = &table_[p * ss * ss];
        for (int a = 0; a < s_; ++a) {
          const auto row = sub2.row(a);
          double rmax = kNegInf;
          for (int b = 0; b < s_; ++b) {
            if (a == b) continue;
            const double val = f(x, row[b]);
            t[a * ss + b] = val;
            rmax = std::max(rmax, val);
          }
          rowmax_[p * ss + a] = rmax;
          gmax_[p] = std::max(gmax_[p], rmax);
        }
      }
    }
    tuple_.assign(k_, -1);
    used_.assign(s_, 0);
    build_level_bounds();
  }

  std::vector<Vertex> run() {
    seed_with_greedy();
    descend(0, 0.0);
    return best_tuple_;
  }

 private:
  int pair_index(int i, int j) const { return j * (j - 1) / 2 + i; }

  double term(int i, int j, int ti, int tj) const {
    const auto ss = static_cast<std::size_t>(s_);
    return table_[pair_index(i, j) * ss * ss + ti * ss + tj];
  }

  // Kernel value contributed by assigning t to level j given levels < j.
  double increment(int j, int t) const {
    double inc = 0.0;
    for (int i = 0; i < j; ++i) inc += term(i, j, tuple_[i], t);
    return inc;
  }

  // Sum of row maxima over the levels after j for the terms that pair level j
  // with a later level, as a function of t_j.
  void build_level_bounds() {
    const auto ss = static_cast<std::size_t>(s_);
    level_rowmax_.assign(static_cast<std::size_t>(k_) * ss, 0.0);
    for (int j = 0; j < k_; ++j)
      for (int later = j + 1; later < k_; ++later) {
        const double* rm = &rowmax_[pair_index(j, later) * ss];
        for (int t = 0; t < s_; ++t) level_rowmax_[j * ss + t] += rm[t];
      }
  }

  // Bound on terms not yet known once levels <= j are fixed, excluding the
  // level-j row maxima (added per candidate from level_rowmax_).
  double fixed_bound(int j) const {
    const auto ss = static_cast<std::size_t>(s_);
    double bound = 0.0;
    for (int later = j + 1; later < k_; ++later)
      for (int i = 0; i < later; ++i) {
        if (i == j) continue;
        const int p = pair_index(i, later);
        bound += i < j ? rowmax_[p * ss + tuple_[i]] : gmax_[p];
      }
    return bound;
  }

  bool hopeless(double bound) const {
    return bound < best_ - 1e-9 * (1.0 + std::abs(best_));
  }

  void offer(double total) {
    if (total > best_ ||
        (total == best_ && std::lexicographical_compare(tuple_.begin(), tuple_.end(),
                                                        best_tuple_.begin(),
                                                        best_tuple_.end()))) {
      best_ = total;
      best_tuple_ = tuple_;
    }
  }

  void seed_with_greedy() {
    double total = 0.0;
    for (int j = 0; j < k_; ++j) {
      int pick = -1;
      double pick_inc = kNegInf;
      if (j == 0) {
        // Pair the first two levels by the best single-edge match.
        int pa = -1, pb = -1;
        for (int a = 0; a < s_; ++a)
          for (int b = 0; b < s_; ++b)
            if (a != b && (pa < 0 || term(0, 1, a, b) > pick_inc)) {
              pick_inc = term(0, 1, a, b);
              pa = a;
              pb = b;
            }
        tuple_[0] = pa;
        used_[pa] = 1;
        pick = pb;
        j = 1;
      } else {
        for (int t = 0; t < s_; ++t) {
          if (used_[t]) continue;
          const double inc = increment(j, t);
          if (pick < 0 || inc > pick_inc) {
            pick = t;
            pick_inc = inc;
          }
        }
      }
      tuple_[j] = pick;
      used_[pick] = 1;
      for (int i = 0; i < j; ++i) total += term(i, j, tuple_[i], pick);
    }
    best_ = total;
    best_tuple_ = tuple_;
    std::fill(used_.begin(), used_.end(), 0);
    std::fill(tuple_.begin(), tuple_.end(), -1);
  }

  void descend(int j, double partial) {
    const auto ss = static_cast<std::size_t>(s_);
    const double* rows[kMaxClique];
    for (int i = 0; i < j; ++i) rows[i] = &table_[pair_index(i, j) * ss * ss + tuple_[i] * ss];
    if (j == k_ - 1) {
      for (int t = 0; t < s_; ++t) {
        if (used_[t]) continue;
        double total = partial;
        for (int i = 0; i < j; ++i) total += rows[i][t];
        if (total >= best_) {
          tuple_[j] = t;
          offer(total);
        }
      }
      tuple_[j] = -1;
      return;
    }
    const double base = fixed_bound(j);
    const double* lr = &level_rowmax_[j * ss];
    for (int t = 0; t < s_; ++t) {
      if (used_[t]) continue;
      double next = partial;
      for (int i = 0; i < j; ++i) next += rows[i][t];
      if (hopeless(next + base + lr[t])) continue;
      tuple_[j] = t;
      used_[t] = 1;
      descend(j + 1, next);
      used_[t] = 0;
    }
    tuple_[j] = -1;
  }

  int k_;
  int s_;
  std::vector<double> table_;
  std::vector<double> rowmax_;
  std::vector<double> gmax_;
  std::vector<double> level_rowmax_;
  std::vector<Vertex> tuple_;
  std::vector<char> used_;
  double best_ = kNegInf;
  std::vector<Vertex> best_tuple_;
};

// Merged assignment for a growing set of compatible cliques, with the edge
// score of the union kept incrementally.
class SeedBuilder {
 public:
  SeedBuilder(const WeightedGraph& sub1, const WeightedGraph& sub2,
              const SimilarityKernel& f)
      : sub1_(sub1), sub2_(sub2), f_(f), image_of_(sub1.size(), -1) {}

  void push(const CliqueMatch& c) {
    marks_.push_back({domain_.size(), sum_});
    for (std::size_t k = 0; k < c.mapping.size(); ++k) {
      const Vertex u = c.mapping.domain[k];
      if (image_of_[u] >= 0) continue;
      const Vertex t = c.mapping.image[k];
      for (std::size_t q = 0; q < domain_.size(); ++q)
        sum_ += f_(sub1_.weight(domain_[q], u), sub2_.weight(image_[q], t));
      domain_.push_back(u);
      image_.push_back(t);
      image_of_[u] = t;
    }
  }

  void pop() {
    const auto [size, sum] = marks_.back();
    marks_.pop_back();
    while (domain_.size() > size) {
      image_of_[domain_.back()] = -1;
      domain_.pop_back();
      image_.pop_back();
    }
    sum_ = sum;
  }

  double average() const { return sum_ / binom2(domain_.size()); }

  PartialInjection mapping() const {
    std::vector<std::size_t> order(domain_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return domain_[a] < domain_[b]; });
    PartialInjection pi;
    for (std::size_t q : order) {
      pi.domain.push_back(domain_[q]);
      pi.image.push_back(image_[q]);
    }
    return pi;
  }

 private:
  struct Mark {
    std::size_t size;
    double sum;
  };

  const WeightedGraph& sub1_;
  const WeightedGraph& sub2_;
  const SimilarityKernel& f_;
  std::vector<Vertex> image_of_;
  std::vector<Vertex> domain_;
  std::vector<Vertex> image_;
  std::vector<Mark> marks_;
  double sum_ = 0.0;
};

struct SeedSearch {
  const std::vector<CliqueMatch>& top;
  const std::vector<std::vector<char>>& compat;
  SeedBuilder& builder;
  int k2;
  std::vector<int> chosen;
  bool found = false;
  double best = kNegInf;
  std::vector<int> best_members;
  PartialInjection best_mapping;

  // Candidates are ascending indices compatible with everything chosen so
  // far, so sets are visited in lexicographic order.
  void extend(const std::vector<int>& candidates) {
    if (static_cast<int>(chosen.size()) == k2) {
      const double avg = builder.average();
      if (!found || avg > best) {
        found = true;
        best = avg;
        best_members = chosen;
        best_mapping = builder.mapping();
      }
      return;
    }
    const int need = k2 - static_cast<int>(chosen.size());
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      if (static_cast<int>(candidates.size() - ci) < need) break;
      const int c = candidates[ci];
      std::vector<int> next;
      if (need > 1) {
        next.reserve(candidates.size() - ci);
        for (std::size_t cj = ci + 1; cj < candidates.size(); ++cj)
          if (compat[c][candidates[cj]]) next.push_back(candidates[cj]);
      }
      chosen.push_back(c);
      builder.push(top[c]);
      extend(next);
      builder.pop();
      chosen.pop_back();
    }
  }
};

}  // namespace

void validate(const AlgoParams& p, int s) {
  require(p.k1 >= 2, ErrorKind::InvalidParameter, "clique size k1 must be >= 2");
  require(p.k2 >= 1, ErrorKind::InvalidParameter, "combining size k2 must be >= 1");
  require(p.n1 >= 1 && p.n2 >= 1 && p.n2 <= p.n1, ErrorKind::InvalidParameter,
          "need 1 <= n2 <= n1");
  require(p.k2 <= p.n2, ErrorKind::InvalidParameter, "need k2 <= n2");
  require(p.m >= 2, ErrorKind::InvalidParameter, "mapping size m must be >= 2");
  require(p.m >= p.k1, ErrorKind::InvalidParameter, "need m >= k1");
  require(p.m <= s, ErrorKind::InvalidParameter,
          "mapping size m=" + std::to_string(p.m) + " exceeds sample size s=" +
              std::to_string(s));
}

CliqueMatch best_clique_injection(const WeightedGraph& sub1, const WeightedGraph& sub2,
                                  std::span<const Vertex> vertex_set,
                                  const SimilarityKernel& f) {
  const int k = static_cast<int>(vertex_set.size());
  require(k >= 2 && k <= kMaxClique, ErrorKind::InvalidParameter,
          "clique size must lie in [2, 16]");
  require(k <= sub2.size(), ErrorKind::InvalidParameter,
          "clique larger than the second sample");
  CliqueSearch search(sub1, sub2, vertex_set, f);
  CliqueMatch match;
  match.vertex_set.assign(vertex_set.begin(), vertex_set.end());
  match.mapping.domain = match.vertex_set;
  match.mapping.image = search.run();
  match.score = similarity_score(f, sub1, sub2, match.mapping);
  return match;
}

std::vector<CliqueMatch> match_cliques(const WeightedGraph& sub1, const WeightedGraph& sub2,
                                       int k1, int n1, const SimilarityKernel& f,
                                       std::uint64_t seed) {
  const int s = sub1.size();
  require(k1 >= 2 && k1 <= s && k1 <= sub2.size(), ErrorKind::InvalidParameter,
          "clique size k1 must satisfy 2 <= k1 <= s");
  require(n1 >= 1, ErrorKind::InvalidParameter, "n1 must be positive");
  const double available = binom_real(s, k1);
  if (available < n1)
    fail(ErrorKind::Infeasible, "only " + std::to_string(static_cast<long long>(available)) +
                                    " distinct " + std::to_string(k1) +
                                    "-subsets exist, n1=" + std::to_string(n1) +
                                    " requested");

  Rng rng = make_rng(derive_seed(seed, "cliques"));
  std::vector<Vertex> pool(s);
  std::set<std::vector<Vertex>> seen;
  std::vector<CliqueMatch> out;
  out.reserve(n1);
  while (static_cast<int>(out.size()) < n1) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k1; ++i) {
      std::uniform_int_distribution<int> pick(i, s - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<Vertex> vs(pool.begin(), pool.begin() + k1);
    std::sort(vs.begin(), vs.end());
    if (!seen.insert(vs).second) continue;
    CliqueMatch match = best_clique_injection(sub1, sub2, vs, f);
    match.generation_index = static_cast<int>(out.size());
    out.push_back(std::move(match));
  }
  return out;
}

std::vector<CliqueMatch> select_top(std::vector<CliqueMatch> matches, int n2) {
  require(n2 >= 1 && n2 <= static_cast<int>(matches.size()), ErrorKind::InvalidParameter,
          "n2=" + std::to_string(n2) + " must lie in [1, " +
              std::to_string(matches.size()) + "]");
  std::stable_sort(matches.begin(), matches.end(),
                   [](const CliqueMatch& a, const CliqueMatch& b) { return a.score > b.score; });
  matches.resize(n2);
  return matches;
}

bool compatible(const CliqueMatch& a, const CliqueMatch& b) {
  const auto& da = a.mapping.domain;
  const auto& ia = a.mapping.image;
  const auto& db = b.mapping.domain;
  const auto& ib = b.mapping.image;
  for (std::size_t x = 0; x < da.size(); ++x)
    for (std::size_t y = 0; y < db.size(); ++y) {
      const bool same_vertex = da[x] == db[y];
      const bool same_image = ia[x] == ib[y];
      if (same_vertex != same_image) return false;
    }
  return true;
}

SeedMapping find_seed(const std::vector<CliqueMatch>& top, int k2,
                      const SimilarityKernel& f, const WeightedGraph& sub1,
                      const WeightedGraph& sub2) {
  require(!top.empty(), ErrorKind::InvalidParameter, "find_seed needs at least one clique");
  require(k2 >= 1 && k2 <= static_cast<int>(top.size()), ErrorKind::InvalidParameter,
          "k2 must lie in [1, |top|]");

  const int count = static_cast<int>(top.size());
  std::vector<std::vector<char>> compat(count, std::vector<char>(count, 1));
  for (int a = 0; a < count; ++a)
    for (int b = a + 1; b < count; ++b)
      compat[a][b] = compat[b][a] = compatible(top[a], top[b]) ? 1 : 0;

  std::vector<int> all(count);
  std::iota(all.begin(), all.end(), 0);
  SeedBuilder builder(sub1, sub2, f);
  for (int size = k2; size >= 1; --size) {
    SeedSearch search{top, compat, builder, size, {}, false, kNegInf, {}, {}};
    search.extend(all);
    if (!search.found) continue;
    SeedMapping seed;
    seed.pi0 = std::move(search.best_mapping);
    seed.members = std::move(search.best_members);
    seed.k2_used = size;
    seed.avg_score = similarity_score(f, sub1, sub2, seed.pi0) / binom2(seed.pi0.size());
    return seed;
  }
  fail(ErrorKind::Internal, "no compatible clique set, not even a singleton");
}

PartialInjection extend_mapping(const SeedMapping& seed, const WeightedGraph& sub1,
                                const WeightedGraph& sub2, int m,
                                const SimilarityKernel& f) {
  const int s1 = sub1.size();
  const int s2 = sub2.size();
  validate_injection(seed.pi0, s1, s2);
  require(static_cast<int>(seed.pi0.size()) <= m, ErrorKind::InvalidParameter,
          "seed has " + std::to_string(seed.pi0.size()) + " pairs, more than m=" +
              std::to_string(m));
  require(m <= s1 && m <= s2, ErrorKind::InvalidParameter, "m exceeds the sample size");

  PartialInjection pi = seed.pi0;
  std::vector<char> used1(s1, 0), used2(s2, 0);
  for (std::size_t k = 0; k < pi.size(); ++k) used1[pi.domain[k]] = used2[pi.image[k]] = 1;

  // gain[v1 * s2 + v2] = sum over mapped v of f(beta_{v1 v}, beta_{v2 pi(v)}),
  // accumulated in mapping order.
  const auto w = static_cast<std::size_t>(s2);
  std::vector<double> gain(static_cast<std::size_t>(s1) * w, 0.0);
  auto absorb = [&](Vertex u, Vertex t) {
    const auto r1 = sub1.row(u);
    const auto r2 = sub2.row(t);
    for (int v1 = 0; v1 < s1; ++v1) {
      if (used1[v1]) continue;
      double* g = &gain[v1 * w];
      for (int v2 = 0; v2 < s2; ++v2)
        if (!used2[v2]) g[v2] += f(r1[v1], r2[v2]);
    }
  };
  for (std::size_t k = 0; k < pi.size(); ++k) absorb(pi.domain[k], pi.image[k]);

  while (static_cast<int>(pi.size()) < m) {
    int b1 = -1, b2 = -1;
    double best = kNegInf;
    for (int v1 = 0; v1 < s1; ++v1) {
      if (used1[v1]) continue;
      const double* g = &gain[v1 * w];
      for (int v2 = 0; v2 < s2; ++v2)
        if (!used2[v2] && (b1 < 0 || g[v2] > best)) {
          best = g[v2];
          b1 = v1;
          b2 = v2;
        }
    }
    pi.domain.push_back(b1);
    pi.image.push_back(b2);
    used1[b1] = used2[b2] = 1;
    absorb(b1, b2);
  }
  return pi;
}

DetectionResult detect(const WeightedGraph& sub1, const WeightedGraph& sub2,
                       const AlgoParams& params) {
  require(sub1.size() == sub2.size(), ErrorKind::InvalidParameter,
          "samples must have the same number of vertices");
  validate(params, sub1.size());
  auto matches = match_cliques(sub1, sub2, params.k1, params.n1, params.f, params.seed);
  const auto top = select_top(std::move(matches), params.n2);
  DetectionResult result;
  result.seed = find_seed(top, params.k2, params.f, sub1, sub2);
  result.mapping = extend_mapping(result.seed, sub1, sub2, params.m, params.f);
  result.statistic = similarity_score(params.f, sub1, sub2, result.mapping);
  result.decision = decide(result.statistic, params.tau);
  return result;
}

}  // namespace subcorr
