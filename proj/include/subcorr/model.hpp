#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace subcorr {

using Vertex = int;

// Complete weighted graph on n labeled vertices. Weights are stored densely
// and kept symmetric; the diagonal is fixed at zero and never read as an edge.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(int n);

  int size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept {
    return static_cast<std::size_t>(n_) * (n_ - 1) / 2;
  }

  double weight(Vertex u, Vertex v) const noexcept {
    return w_[static_cast<std::size_t>(u) * n_ + v];
  }
  void set_weight(Vertex u, Vertex v, double value);

  // Row u of the adjacency matrix (entry u is the zero diagonal).
  std::span<const double> row(Vertex u) const noexcept {
    return {w_.data() + static_cast<std::size_t>(u) * n_,
            static_cast<std::size_t>(n_)};
  }

  // Weights of all unordered pairs u < v in row-major order.
  std::vector<double> upper_weights() const;

  WeightedGraph induced(std::span<const Vertex> vertices) const;

  bool operator==(const WeightedGraph&) const = default;

 private:
  int n_ = 0;
  std::vector<double> w_;
};

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Vertex> image);

  static Permutation identity(int n);
  static Permutation random(int n, std::uint64_t seed);

  int size() const noexcept { return static_cast<int>(image_.size()); }
  Vertex operator()(Vertex v) const noexcept { return image_[v]; }
  const std::vector<Vertex>& image() const noexcept { return image_; }
  Permutation inverse() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<Vertex> image_;
};

enum class Hypothesis { Null, Alt };

const char* to_string(Hypothesis h);
Hypothesis parse_hypothesis(std::string_view text);

struct GraphPairInstance {
  WeightedGraph g1;
  WeightedGraph g2;
  Hypothesis hypothesis = Hypothesis::Null;
  std::optional<Permutation> latent_perm;  // present iff Alt
  std::optional<double> rho;               // present iff Alt
};

struct SampledSubgraphs {
  WeightedGraph sub1;
  WeightedGraph sub2;
  std::vector<Vertex> idx1;  // ascending parent indices into g1
  std::vector<Vertex> idx2;  // ascending parent indices into g2
};

// Local vertex sets of the two samples that correspond under the latent
// permutation. s[k] and t[k] are paired (t[k] is the image of s[k]).
struct CommonVertexSets {
  std::vector<Vertex> s;
  std::vector<Vertex> t;
};

// Under Alt, beta_{pi(u)pi(v)}(G2) = rho * beta_uv(G1) + sqrt(1 - rho^2) Z_uv.
GraphPairInstance generate_pair(int n, double rho, Hypothesis hypothesis,
                                std::uint64_t seed);

// Uniform s-subset of [n] by partial Fisher-Yates, returned ascending.
std::vector<Vertex> sample_subset(int n, int s, std::uint64_t seed);

SampledSubgraphs sample_subgraphs(const GraphPairInstance& pair, int s,
                                  std::uint64_t seed);

CommonVertexSets common_vertex_sets(std::span<const Vertex> idx1,
                                    std::span<const Vertex> idx2,
                                    const Permutation& latent_perm);

inline CommonVertexSets common_vertex_sets(const SampledSubgraphs& sample,
                                           const Permutation& latent_perm) {
  return common_vertex_sets(sample.idx1, sample.idx2, latent_perm);
}

// Reads a `u,v,weight` CSV. Absent pairs get weight 0.
WeightedGraph load_graph_from_edge_list(const std::filesystem::path& path);

// Writes one `u,v,weight` row per unordered pair with u < v.
void write_graph_csv(const WeightedGraph& g, const std::filesystem::path& path);

// floor((1 - epsilon) s^2 / n); throws sample-too-small when that is zero.
int mapping_size_m(int n, int s, double epsilon);

}  // namespace subcorr
