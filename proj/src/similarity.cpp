#include "subcorr/similarity.hpp"

#include <string>

#include "subcorr/csv.hpp"
#include "subcorr/error.hpp"

namespace subcorr {

SimilarityKernel SimilarityKernel::mle(double rho) {
  require(rho > 0.0 && rho < 1.0, ErrorKind::InvalidParameter,
          "mle kernel needs rho in (0,1)");
  return SimilarityKernel(Kind::Mle, rho);
}

SimilarityKernel SimilarityKernel::parse(std::string_view name, double rho) {
  if (name == "overlap") return overlap();
  if (name == "mse") return neg_half_sq_diff();
  if (name == "mle") return mle(rho);
  fail(ErrorKind::InvalidParameter,
       "unknown kernel '" + std::string(name) + "' (expected overlap|mse|mle)");
}

std::string SimilarityKernel::name() const {
  switch (kind_) {
    case Kind::Overlap: return "overlap";
    case Kind::NegHalfSqDiff: return "mse";
    case Kind::Mle: return "mle(" + csv::format_double(rho_) + ")";
  }
  return "?";
}

void validate_injection(const PartialInjection& pi, int n1, int n2) {
  if (pi.domain.size() != pi.image.size())
    fail(ErrorKind::InvalidMapping, "domain and image lengths differ");
  std::vector<char> seen1(n1, 0), seen2(n2, 0);
  for (std::size_t k = 0; k < pi.domain.size(); ++k) {
    const Vertex u = pi.domain[k];
    const Vertex v = pi.image[k];
    if (u < 0 || u >= n1)
      fail(ErrorKind::InvalidMapping, "domain vertex " + std::to_string(u) + " out of range");
    if (v < 0 || v >= n2)
      fail(ErrorKind::InvalidMapping, "image vertex " + std::to_string(v) + " out of range");
    if (seen1[u])
      fail(ErrorKind::InvalidMapping, "domain vertex " + std::to_string(u) + " repeated");
    if (seen2[v])
      fail(ErrorKind::InvalidMapping, "image vertex " + std::to_string(v) + " repeated");
    seen1[u] = seen2[v] = 1;
  }
}

double similarity_score(const SimilarityKernel& f, const WeightedGraph& sub1,
                        const WeightedGraph& sub2, const PartialInjection& pi) {
  validate_injection(pi, sub1.size(), sub2.size());
  const std::size_t m = pi.size();
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = k + 1; l < m; ++l)
      total += f(sub1.weight(pi.domain[k], pi.domain[l]),
                 sub2.weight(pi.image[k], pi.image[l]));
  return total;
}

double normalized_score(const SimilarityKernel& f, const WeightedGraph& sub1,
                        const WeightedGraph& sub2, const PartialInjection& pi, int s) {
  require(s >= 2, ErrorKind::InvalidParameter, "normalized score needs s >= 2");
  const double pairs = 0.5 * static_cast<double>(s) * (s - 1);
  return similarity_score(f, sub1, sub2, pi) / pairs;
}

}  // namespace subcorr
