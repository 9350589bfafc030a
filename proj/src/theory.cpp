#include "subcorr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "subcorr/error.hpp"
#include "subcorr/parallel.hpp"
#include "subcorr/rng.hpp"

namespace subcorr::theory {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

// Sampled side-1 parent vertices whose image under perm lands in idx2.
std::vector<Vertex> common_parents(const Permutation& perm, std::span<const Vertex> idx1,
                                   const std::vector<char>& in2) {
  std::vector<Vertex> out;
  for (Vertex u : idx1)
    if (in2[perm(u)]) out.push_back(u);
  return out;
}

std::int64_t pair_key(Vertex a, Vertex b, int n) {
  if (a > b) std::swap(a, b);
  return static_cast<std::int64_t>(a) * n + b;
}

struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    const double total = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * o.count / total;
    count += o.count;
  }
};

constexpr std::uint64_t kBlock = 10000;

}  // namespace

double hypergeom_pmf(int n, int s, int t) {
  require(n >= 1 && s >= 0 && s <= n, ErrorKind::InvalidParameter,
          "hypergeom_pmf needs 0 <= s <= n");
  require(t >= 0 && t <= s, ErrorKind::InvalidParameter, "hypergeom_pmf needs 0 <= t <= s");
  const int lo = std::max(0, 2 * s - n);
  if (t < lo) return 0.0;
  // Unnormalized weights from the mode outward via the ratio pmf(u+1)/pmf(u),
  // then normalized over the support; lgamma differences lose ~1e-11 at n=1e4.
  const int mode = std::clamp(static_cast<int>((s + 1.0) * (s + 1.0) / (n + 2.0)), lo, s);
  auto ratio = [&](int u) {
    const double a = s - u;
    return a * a / ((u + 1.0) * (n - 2.0 * s + u + 1.0));
  };
  double total = 1.0, at_t = t == mode ? 1.0 : 0.0;
  double w = 1.0;
  for (int u = mode; u < s && w > 0.0; ++u) {
    w *= ratio(u);
    total += w;
    if (u + 1 == t) at_t = w;
  }
  w = 1.0;
  for (int u = mode - 1; u >= lo && w > 0.0; --u) {
    w /= ratio(u);
    total += w;
    if (u == t) at_t = w;
  }
  return at_t / total;
}

TailBounds hypergeom_tail_bounds(int n, int s, double epsilon) {
  require(n >= 1 && s >= 0 && s <= n, ErrorKind::InvalidParameter,
          "tail bounds need 0 <= s <= n");
  const double e2 = epsilon * epsilon;
  const double sd = s, nd = n;
  const double hoeffding = std::exp(-e2 * sd * sd * sd / (nd * nd));
  return {std::min(std::exp(-e2 * sd * sd / ((2.0 + epsilon) * nd)), hoeffding),
          std::min(std::exp(-e2 * sd * sd / (2.0 * nd)), hoeffding)};
}

double mgf_overlap(double lambda) {
  require(std::abs(lambda) < 1.0, ErrorKind::InvalidParameter,
          "E[exp(lambda XY)] diverges for |lambda| >= 1");
  return 1.0 / std::sqrt(1.0 - lambda * lambda);
}

double mgf_mse(double lambda) {
  require(lambda > -0.5, ErrorKind::InvalidParameter,
          "E[exp(-lambda (X-Y)^2 / 2)] diverges for lambda <= -1/2");
  return 1.0 / std::sqrt(1.0 + 2.0 * lambda);
}

double likelihood_ratio(double a, double b, double rho) {
  require(rho > 0.0 && rho < 1.0, ErrorKind::InvalidParameter,
          "likelihood ratio needs rho in (0,1)");
  const double r2 = rho * rho;
  const double q = 1.0 - r2;
  return std::exp((-r2 * (a * a + b * b) + 2.0 * rho * a * b) / (2.0 * q)) / std::sqrt(q);
}

FunctionalDigraph build_digraph(const Permutation& pi, const Permutation& pit,
                                std::span<const Vertex> idx1,
                                std::span<const Vertex> idx2) {
  const int n = pi.size();
  require(pit.size() == n, ErrorKind::InvalidParameter, "permutations differ in size");
  std::vector<char> in2(n, 0);
  for (Vertex v : idx2) in2[v] = 1;

  FunctionalDigraph d;
  d.idx1.assign(idx1.begin(), idx1.end());
  d.idx2.assign(idx2.begin(), idx2.end());
  std::unordered_map<std::int64_t, int> side1, side2;

  auto node = [&](std::unordered_map<std::int64_t, int>& index, Side side, Vertex a,
                  Vertex b) {
    if (a > b) std::swap(a, b);
    auto [it, inserted] = index.emplace(pair_key(a, b, n), static_cast<int>(d.nodes.size()));
    if (inserted) d.nodes.push_back({side, a, b});
    return it->second;
  };

  const auto s_pi = common_parents(pi, idx1, in2);
  const auto s_pit = common_parents(pit, idx1, in2);
  for (std::size_t x = 0; x < s_pi.size(); ++x)
    for (std::size_t y = x + 1; y < s_pi.size(); ++y) {
      const int from = node(side1, Side::One, s_pi[x], s_pi[y]);
      const int to = node(side2, Side::Two, pi(s_pi[x]), pi(s_pi[y]));
      d.arcs.emplace_back(from, to);
    }
  for (std::size_t x = 0; x < s_pit.size(); ++x)
    for (std::size_t y = x + 1; y < s_pit.size(); ++y) {
      const int from = node(side1, Side::One, s_pit[x], s_pit[y]);
      const int to = node(side2, Side::Two, pit(s_pit[x]), pit(s_pit[y]));
      d.merges.emplace_back(from, to);
    }
  return d;
}

Decomposition decompose(const FunctionalDigraph& d) {
  const std::size_t count = d.nodes.size();
  // adjacency: (neighbor, link id); arcs first, then merges.
  std::vector<std::vector<std::pair<int, int>>> adj(count);
  DisjointSets sets(count);
  int link = 0;
  for (const auto& [a, b] : d.arcs) {
    adj[a].emplace_back(b, link);
    adj[b].emplace_back(a, link++);
    sets.unite(a, b);
  }
  for (const auto& [a, b] : d.merges) {
    adj[a].emplace_back(b, link);
    adj[b].emplace_back(a, link++);
    sets.unite(a, b);
  }
  for (std::size_t v = 0; v < count; ++v)
    if (adj[v].size() > 2)
      fail(ErrorKind::Internal, "functional digraph node " + std::to_string(v) +
                                    " has degree " + std::to_string(adj[v].size()));

  std::vector<std::vector<int>> members(count);
  for (std::size_t v = 0; v < count; ++v) members[sets.find(static_cast<int>(v))].push_back(static_cast<int>(v));

  Decomposition out;
  for (const auto& group : members) {
    if (group.empty()) continue;
    const bool cycle = std::all_of(group.begin(), group.end(),
                                   [&](int v) { return adj[v].size() == 2; });
    int start = group.front();
    if (!cycle)
      start = *std::find_if(group.begin(), group.end(),
                            [&](int v) { return adj[v].size() < 2; });
    Component comp;
    int at = start;
    int via = -1;
    while (true) {
      comp.nodes.push_back(at);
      if (d.nodes[at].side == Side::One) ++comp.side1_count;
      int next = -1, next_link = -1;
      for (const auto& [nb, id] : adj[at])
        if (id != via) {
          next = nb;
          next_link = id;
          break;
        }
      if (next < 0 || next == start) break;
      at = next;
      via = next_link;
    }
    if (comp.nodes.size() != group.size())
      fail(ErrorKind::Internal, "component walk did not cover its component");
    (cycle ? out.cycles : out.paths).push_back(std::move(comp));
  }
  return out;
}

std::vector<Vertex> cycle_vertex_set(const FunctionalDigraph& d, const Decomposition& dec) {
  std::vector<Vertex> parents;
  for (const auto& c : dec.cycles)
    for (int v : c.nodes)
      if (d.nodes[v].side == Side::One) {
        parents.push_back(d.nodes[v].a);
        parents.push_back(d.nodes[v].b);
      }
  std::vector<Vertex> local;
  for (Vertex p : parents) {
    const auto it = std::lower_bound(d.idx1.begin(), d.idx1.end(), p);
    local.push_back(static_cast<Vertex>(it - d.idx1.begin()));
  }
  std::sort(local.begin(), local.end());
  local.erase(std::unique(local.begin(), local.end()), local.end());
  return local;
}

CoreSet core_set(const Permutation& pi, const Permutation& pit,
                 std::span<const Vertex> idx1, std::span<const Vertex> idx2) {
  require(std::is_sorted(idx1.begin(), idx1.end()), ErrorKind::InvalidParameter,
          "idx1 must be ascending");
  const auto d = build_digraph(pi, pit, idx1, idx2);
  CoreSet core{cycle_vertex_set(d, decompose(d))};
  if (core.vertices.empty()) {
    std::vector<char> in2(pi.size(), 0);
    for (Vertex v : idx2) in2[v] = 1;
    for (std::size_t a = 0; a < idx1.size(); ++a)
      if (pi(idx1[a]) == pit(idx1[a]) && in2[pi(idx1[a])]) {
        core.vertices.push_back(static_cast<Vertex>(a));
        break;
      }
  }
  return core;
}

double component_expectation(const ComponentKind& kind, double rho) {
  if (std::holds_alternative<PathKind>(kind)) return 1.0;
  const int j = std::get<CycleKind>(kind).j;
  return 1.0 / (1.0 - std::pow(rho, 2.0 * j));
}

McEstimate mc_component_expectation(const ComponentKind& kind, double rho,
                                    std::uint64_t trials, std::uint64_t seed,
                                    unsigned workers) {
  require(rho > 0.0 && rho < 1.0, ErrorKind::InvalidParameter, "rho must lie in (0,1)");
  require(trials >= 1000, ErrorKind::InvalidParameter, "need at least 1000 trials");
  const bool is_path = std::holds_alternative<PathKind>(kind);
  const int factors = is_path ? std::get<PathKind>(kind).k : 2 * std::get<CycleKind>(kind).j;
  require(factors >= 1, ErrorKind::InvalidParameter, "component needs k >= 1 / j >= 1");
  const int variables = is_path ? factors + 1 : factors;

  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<Moments> parts(blocks);
  parallel_for(blocks, workers, [&](std::size_t blk) {
    Rng rng = make_rng(derive_seed(seed, "mc_component", blk));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> b(variables);
    const std::uint64_t begin = blk * kBlock;
    const std::uint64_t end = std::min(trials, begin + kBlock);
    for (std::uint64_t i = begin; i < end; ++i) {
      for (double& x : b) x = normal(rng);
      double prod = 1.0;
      for (int f = 0; f < factors; ++f)
        prod *= likelihood_ratio(b[f], b[(f + 1) % variables], rho);
      parts[blk].add(prod);
    }
  });
  Moments total;
  for (const auto& p : parts) total.merge(p);
  const double var = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
  return {total.mean, std::sqrt(var / static_cast<double>(total.count)), total.count};
}

double sample_complexity_boundary(int n, double rho, double constant) {
  require(n >= 2, ErrorKind::InvalidParameter, "boundary needs n >= 2");
  require(rho > 0.0 && rho < 1.0, ErrorKind::InvalidParameter, "rho must lie in (0,1)");
  require(constant > 0.0, ErrorKind::InvalidParameter, "constant must be positive");
  const double nd = n;
  const double info = std::log(1.0 / (1.0 - rho * rho));
  return std::sqrt(constant * std::max(nd * std::log(nd) / info, nd));
}

TailCheck core_set_tail_check(int n, int s, int t, std::uint64_t trials,
                              std::uint64_t seed) {
  require(s >= 1 && s <= n, ErrorKind::InvalidParameter, "need 1 <= s <= n");
  require(t >= 0 && t <= s, ErrorKind::InvalidParameter, "need 0 <= t <= s");
  require(trials >= 1000, ErrorKind::InvalidParameter, "need at least 1000 trials");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const std::uint64_t trial_seed = derive_seed(seed, "core_tail", i);
    const auto pi = Permutation::random(n, derive_seed(trial_seed, "pi"));
    const auto pit = Permutation::random(n, derive_seed(trial_seed, "pit"));
    const auto idx1 = sample_subset(n, s, derive_seed(trial_seed, "idx1"));
    const auto idx2 = sample_subset(n, s, derive_seed(trial_seed, "idx2"));
    if (static_cast<int>(core_set(pi, pit, idx1, idx2).vertices.size()) == t) ++hits;
  }
  TailCheck out;
  out.frequency = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = std::pow(static_cast<double>(s) / n, 2.0 * t);
  const double p = std::min(1.0, out.bound);
  out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  out.violated = out.frequency > out.bound + 3.0 * out.std_error;
  return out;
}

}  // namespace subcorr::theory
