#include "subcorr/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "subcorr/csv.hpp"
#include "subcorr/error.hpp"
#include "subcorr/rng.hpp"

namespace subcorr {

WeightedGraph::WeightedGraph(int n) : n_(n) {
  require(n >= 0, ErrorKind::InvalidParameter, "vertex count must be nonnegative");
  w_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

void WeightedGraph::set_weight(Vertex u, Vertex v, double value) {
  require(u != v, ErrorKind::Data, "self-loops are not edges");
  w_[static_cast<std::size_t>(u) * n_ + v] = value;
  w_[static_cast<std::size_t>(v) * n_ + u] = value;
}

std::vector<double> WeightedGraph::upper_weights() const {
  std::vector<double> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v = u + 1; v < n_; ++v) out.push_back(weight(u, v));
  return out;
}

WeightedGraph WeightedGraph::induced(std::span<const Vertex> vertices) const {
  const int s = static_cast<int>(vertices.size());
  WeightedGraph sub(s);
  for (int a = 0; a < s; ++a)
    for (int b = a + 1; b < s; ++b)
      sub.set_weight(a, b, weight(vertices[a], vertices[b]));
  return sub;
}

Permutation::Permutation(std::vector<Vertex> image) : image_(std::move(image)) {
  std::vector<char> seen(image_.size(), 0);
  for (Vertex v : image_) {
    require(v >= 0 && static_cast<std::size_t>(v) < image_.size() && !seen[v],
            ErrorKind::InvalidParameter, "permutation image is not a bijection");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<Vertex> image(n);
  std::iota(image.begin(), image.end(), 0);
  return Permutation(std::move(image));
}

Permutation Permutation::random(int n, std::uint64_t seed) {
  std::vector<Vertex> image(n);
  std::iota(image.begin(), image.end(), 0);
  Rng rng = make_rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(image[i], image[pick(rng)]);
  }
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  std::vector<Vertex> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<Vertex>(i);
  return Permutation(std::move(inv));
}

const char* to_string(Hypothesis h) { return h == Hypothesis::Null ? "null" : "alt"; }

Hypothesis parse_hypothesis(std::string_view text) {
  if (text == "null") return Hypothesis::Null;
  if (text == "alt") return Hypothesis::Alt;
  fail(ErrorKind::InvalidParameter, "hypothesis must be 'null' or 'alt', got '" +
                                        std::string(text) + "'");
}

GraphPairInstance generate_pair(int n, double rho, Hypothesis hypothesis,
                                std::uint64_t seed) {
  require(n >= 2, ErrorKind::InvalidParameter, "generate_pair needs n >= 2");
  if (hypothesis == Hypothesis::Alt)
    require(rho > 0.0 && rho < 1.0, ErrorKind::InvalidParameter,
            "rho must lie in (0,1) under the alternative");

  GraphPairInstance pair;
  pair.hypothesis = hypothesis;
  pair.g1 = WeightedGraph(n);
  pair.g2 = WeightedGraph(n);

  std::normal_distribution<double> normal(0.0, 1.0);
  Rng w1 = make_rng(derive_seed(seed, "weights/g1"));
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) pair.g1.set_weight(u, v, normal(w1));

  Rng w2 = make_rng(derive_seed(seed, "weights/g2"));
  if (hypothesis == Hypothesis::Null) {
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) pair.g2.set_weight(u, v, normal(w2));
    return pair;
  }

  Permutation perm = Permutation::random(n, derive_seed(seed, "latent_perm"));
  const double noise = std::sqrt(1.0 - rho * rho);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      pair.g2.set_weight(perm(u), perm(v), rho * pair.g1.weight(u, v) + noise * normal(w2));
  pair.latent_perm = std::move(perm);
  pair.rho = rho;
  return pair;
}

std::vector<Vertex> sample_subset(int n, int s, std::uint64_t seed) {
  require(s >= 1 && s <= n, ErrorKind::InvalidParameter,
          "sample size s must satisfy 1 <= s <= n");
  std::vector<Vertex> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng = make_rng(seed);
  for (int i = 0; i < s; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(s);
  std::sort(pool.begin(), pool.end());
  return pool;
}

SampledSubgraphs sample_subgraphs(const GraphPairInstance& pair, int s,
                                  std::uint64_t seed) {
  const int n = pair.g1.size();
  require(pair.g2.size() == n, ErrorKind::InvalidParameter, "graph sizes differ");
  require(s >= 1 && s <= n, ErrorKind::InvalidParameter,
          "sample size s must satisfy 1 <= s <= n");
  SampledSubgraphs out;
  out.idx1 = sample_subset(n, s, derive_seed(seed, "sample/idx1"));
  out.idx2 = sample_subset(n, s, derive_seed(seed, "sample/idx2"));
  out.sub1 = pair.g1.induced(out.idx1);
  out.sub2 = pair.g2.induced(out.idx2);
  return out;
}

CommonVertexSets common_vertex_sets(std::span<const Vertex> idx1,
                                    std::span<const Vertex> idx2,
                                    const Permutation& latent_perm) {
  const int n = latent_perm.size();
  std::vector<int> local2(n, -1);
  for (std::size_t b = 0; b < idx2.size(); ++b) local2[idx2[b]] = static_cast<int>(b);

  CommonVertexSets out;
  for (std::size_t a = 0; a < idx1.size(); ++a) {
    const int b = local2[latent_perm(idx1[a])];
    if (b >= 0) {
      out.s.push_back(static_cast<Vertex>(a));
      out.t.push_back(b);
    }
  }
  return out;
}

WeightedGraph load_graph_from_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::map<std::pair<Vertex, Vertex>, double> edges;
  Vertex max_id = -1;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!saw_header) {
      require(text == "u,v,weight", ErrorKind::Parse,
              where + ": expected header 'u,v,weight'");
      saw_header = true;
      continue;
    }
    const auto fields = csv::split(text);
    require(fields.size() == 3, ErrorKind::Parse, where + ": expected 3 fields");
    long long u = 0, v = 0;
    double w = 0.0;
    try {
      u = csv::parse_int(fields[0]);
      v = csv::parse_int(fields[1]);
      w = csv::parse_double(fields[2]);
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::Parse, where + ": " + e.what());
    }
    require(u >= 0 && v >= 0 && u < (1LL << 30) && v < (1LL << 30), ErrorKind::Parse,
            where + ": vertex ids must be nonnegative integers");
    require(std::isfinite(w), ErrorKind::Data, where + ": weight must be finite");
    require(u != v, ErrorKind::Data, where + ": self-loop " + std::to_string(u));

    const std::pair<Vertex, Vertex> key{static_cast<Vertex>(std::min(u, v)),
                                        static_cast<Vertex>(std::max(u, v))};
    auto [it, inserted] = edges.emplace(key, w);
    require(inserted || it->second == w, ErrorKind::Data,
            where + ": conflicting duplicate weight for pair (" +
                std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    max_id = std::max<Vertex>(max_id, key.second);
  }
  require(saw_header, ErrorKind::Parse, path.string() + ": missing header 'u,v,weight'");
  require(max_id >= 1, ErrorKind::Data, path.string() + ": no edges");

  WeightedGraph g(max_id + 1);
  for (const auto& [key, w] : edges) g.set_weight(key.first, key.second, w);
  return g;
}

void write_graph_csv(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << "u,v,weight\n";
  for (Vertex u = 0; u < g.size(); ++u)
    for (Vertex v = u + 1; v < g.size(); ++v)
      out << u << ',' << v << ',' << csv::format_double(g.weight(u, v)) << '\n';
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path.string());
}

int mapping_size_m(int n, int s, double epsilon) {
  require(n >= 1 && s >= 1 && s <= n, ErrorKind::InvalidParameter,
          "mapping size needs 1 <= s <= n");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::InvalidParameter,
          "epsilon must lie in (0,1)");
  const double raw = (1.0 - epsilon) * static_cast<double>(s) * s / n;
  const int m = static_cast<int>(std::floor(raw));
  require(m >= 1, ErrorKind::SampleTooSmall,
          "floor((1-eps) s^2 / n) = " + std::to_string(m) + " for n=" + std::to_string(n) +
              ", s=" + std::to_string(s) + "; detection is degenerate");
  return m;
}

}  // namespace subcorr
