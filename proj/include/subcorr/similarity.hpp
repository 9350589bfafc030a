#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "subcorr/model.hpp"

namespace subcorr {

// Bivariate edge kernel f(x, y) scoring a matched pair of edge weights.
class SimilarityKernel {
 public:
  enum class Kind { Overlap, NegHalfSqDiff, Mle };

  static SimilarityKernel overlap() { return SimilarityKernel(Kind::Overlap, 0.0); }
  static SimilarityKernel neg_half_sq_diff() {
    return SimilarityKernel(Kind::NegHalfSqDiff, 0.0);
  }
  // rho is the correlation the detector assumes, not the instance's.
  static SimilarityKernel mle(double rho);

  // "overlap", "mse" or "mle"; rho is only read for "mle".
  static SimilarityKernel parse(std::string_view name, double rho = 0.0);

  Kind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }
  std::string name() const;

  double operator()(double x, double y) const noexcept {
    switch (kind_) {
      case Kind::Overlap:
        return x * y;
      case Kind::NegHalfSqDiff: {
        const double d = x - y;
        return -0.5 * d * d;
      }
      case Kind::Mle:
        return -rho_ * rho_ * (x * x + y * y) + 2.0 * rho_ * (x * y);
    }
    return 0.0;
  }

  bool operator==(const SimilarityKernel&) const = default;

 private:
  SimilarityKernel(Kind kind, double rho) : kind_(kind), rho_(rho) {}

  Kind kind_;
  double rho_;
};

inline double kernel_eval(const SimilarityKernel& f, double x, double y) {
  return f(x, y);
}

// Injective map from sub1 to sub2, paired positionally: domain[k] -> image[k].
struct PartialInjection {
  std::vector<Vertex> domain;
  std::vector<Vertex> image;

  std::size_t size() const noexcept { return domain.size(); }
  bool operator==(const PartialInjection&) const = default;
};

// Throws invalid-mapping unless the lists have equal length, hold distinct
// entries and stay inside [0, n1) / [0, n2).
void validate_injection(const PartialInjection& pi, int n1, int n2);

// Sum over unordered pairs {u, v} of the domain of
// f(beta_uv(sub1), beta_{pi(u) pi(v)}(sub2)). Pairs are visited in positional
// order (k < l, k outer), so the floating-point result is reproducible.
double similarity_score(const SimilarityKernel& f, const WeightedGraph& sub1,
                        const WeightedGraph& sub2, const PartialInjection& pi);

// similarity_score / binom(s, 2).
double normalized_score(const SimilarityKernel& f, const WeightedGraph& sub1,
                        const WeightedGraph& sub2, const PartialInjection& pi, int s);

}  // namespace subcorr
