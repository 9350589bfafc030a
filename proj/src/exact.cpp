#include "subcorr/exact.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "subcorr/error.hpp"

namespace subcorr {
namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t binom_sat(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(r);
}

// Advances an ascending k-combination of [n] to its lexicographic successor.
bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

}  // namespace

std::uint64_t exact_evaluation_count(int s, int m) {
  const std::uint64_t b = binom_sat(s, m);
  std::uint64_t total = mul_sat(b, b);
  for (int i = 2; i <= m; ++i) total = mul_sat(total, static_cast<std::uint64_t>(i));
  return total;
}

ExactResult enumerate_max_score(const WeightedGraph& sub1, const WeightedGraph& sub2,
                                int m, const SimilarityKernel& f, ExactBudget budget) {
  const int s1 = sub1.size();
  const int s2 = sub2.size();
  require(budget.max_evaluations >= 1, ErrorKind::InvalidParameter,
          "exact budget must be at least 1");
  require(m >= 2 && m <= s1 && m <= s2, ErrorKind::InvalidParameter,
          "exact search needs 2 <= m <= s");

  const std::uint64_t required =
      mul_sat(mul_sat(binom_sat(s1, m), binom_sat(s2, m)), exact_evaluation_count(m, m));
  if (required > budget.max_evaluations)
    fail(ErrorKind::Infeasible,
         "exact search requires " +
             (required == kSaturated ? std::string("more than 2^64") : std::to_string(required)) +
             " mapping evaluations, budget is " + std::to_string(budget.max_evaluations));

  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> a(mm * mm), b(mm * mm);
  std::vector<int> dom(m), img(m), perm(m);
  std::iota(dom.begin(), dom.end(), 0);

  ExactResult best;
  best.score = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  do {
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) a[k * mm + l] = sub1.weight(dom[k], dom[l]);
    std::iota(img.begin(), img.end(), 0);
    do {
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) b[k * mm + l] = sub2.weight(img[k], img[l]);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        double total = 0.0;
        for (int k = 0; k < m; ++k) {
          const double* brow = &b[perm[k] * mm];
          for (int l = k + 1; l < m; ++l) total += f(a[k * mm + l], brow[perm[l]]);
        }
        ++best.evaluations;
        if (!have_best || total > best.score) {
          have_best = true;
          best.score = total;
          best.argmax.domain.assign(dom.begin(), dom.end());
          best.argmax.image.resize(mm);
          for (int k = 0; k < m; ++k) best.argmax.image[k] = img[perm[k]];
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    } while (next_combination(img, s2));
  } while (next_combination(dom, s1));

  return best;
}

double threshold_overlap(int m, double rho) {
  require(m >= 2, ErrorKind::InvalidParameter, "threshold needs m >= 2");
  const double pairs = 0.5 * static_cast<double>(m) * (m - 1);
  return pairs * rho / 2.0;
}

double threshold_mse(int m, double rho) {
  require(m >= 2, ErrorKind::InvalidParameter, "threshold needs m >= 2");
  const double pairs = 0.5 * static_cast<double>(m) * (m - 1);
  return 2.0 * pairs * (rho - 1.0);
}

const char* to_string(Decision d) {
  return d == Decision::RejectNull ? "reject" : "accept";
}

}  // namespace subcorr
