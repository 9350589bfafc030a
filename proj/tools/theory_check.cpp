#include "theory_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "subcorr/model.hpp"
#include "subcorr/rng.hpp"
#include "subcorr/theory.hpp"

using namespace subcorr;

namespace {

struct Row {
  std::string name;
  bool pass;
  std::string detail;
};

struct Mean {
  double mean;
  double se;
};

Mean mc_mean(std::uint64_t trials, std::uint64_t seed,
             const std::function<double(double, double)>& fn) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 1; i <= trials; ++i) {
    const double x = normal(rng);
    const double y = normal(rng);
    const double v = fn(x, y);
    const double d = v - mean;
    mean += d / static_cast<double>(i);
    m2 += d * (v - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(trials - 1) / static_cast<double>(trials))};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

Row within_3se(const std::string& name, Mean m, double target) {
  const bool ok = std::abs(m.mean - target) <= 3.0 * m.se;
  return {name, ok, "est=" + fmt(m.mean) + " se=" + fmt(m.se) + " target=" + fmt(target)};
}

}  // namespace

bool run_theory_check(const TheoryCheckOptions& opt, std::ostream& out) {
  const std::uint64_t trials = std::max<std::uint64_t>(opt.trials, 1000);
  std::vector<Row> rows;

  {
    double total = 0.0;
    for (int t = 0; t <= 25; ++t) total += theory::hypergeom_pmf(50, 25, t);
    rows.push_back({"hypergeom pmf sums to 1 (n=50,s=25)", std::abs(total - 1.0) < 1e-12,
                    "sum=" + fmt(total)});
  }

  {
    bool ok = true;
    std::string detail;
    for (double eps : {0.01, 0.1, 0.5}) {
      const int n = 50, s = 25;
      const double mean = double(s) * s / n;
      double up = 0.0, lo = 0.0;
      for (int t = 0; t <= s; ++t) {
        const double p = theory::hypergeom_pmf(n, s, t);
        if (t >= (1 + eps) * mean) up += p;
        if (t <= (1 - eps) * mean) lo += p;
      }
      const auto b = theory::hypergeom_tail_bounds(n, s, eps);
      ok = ok && up <= b.upper && lo <= b.lower;
    }
    rows.push_back({"hypergeom tail bounds dominate exact tails (n=50,s=25)", ok, ""});
  }

  {
    const int n = 20, s = 8;
    std::vector<double> freq(s + 1, 0.0);
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto pi = Permutation::random(n, derive_seed(opt.seed, "law/perm", i));
      const auto idx1 = sample_subset(n, s, derive_seed(opt.seed, "law/idx1", i));
      const auto idx2 = sample_subset(n, s, derive_seed(opt.seed, "law/idx2", i));
      freq[common_vertex_sets(idx1, idx2, pi).s.size()] += 1.0;
    }
    double tv = 0.0;
    for (int t = 0; t <= s; ++t)
      tv += std::abs(freq[t] / static_cast<double>(trials) - theory::hypergeom_pmf(n, s, t));
    tv /= 2.0;
    rows.push_back({"common-set size law vs HG(20,8,8)", tv < 0.02, "tv=" + fmt(tv)});
  }

  std::uint64_t label = 0;
  for (double lambda : {0.1, 0.3, 0.6})
    rows.push_back(within_3se(
        "mgf_overlap(" + fmt(lambda) + ") vs Monte Carlo",
        mc_mean(trials, derive_seed(opt.seed, "mgf", label++),
                [lambda](double x, double y) { return std::exp(lambda * x * y); }),
        theory::mgf_overlap(lambda)));
  for (double lambda : {0.5, 1.5, 5.0})
    rows.push_back(within_3se(
        "mgf_mse(" + fmt(lambda) + ") vs Monte Carlo",
        mc_mean(trials, derive_seed(opt.seed, "mgf", label++),
                [lambda](double x, double y) { return std::exp(-lambda / 2 * (x - y) * (x - y)); }),
        theory::mgf_mse(lambda)));
  rows.push_back(within_3se(
      "likelihood ratio has unit mean under independence (rho=0.5)",
      mc_mean(trials, derive_seed(opt.seed, "lr"),
              [](double x, double y) { return theory::likelihood_ratio(x, y, 0.5); }),
      1.0));

  const std::vector<std::pair<std::string, theory::ComponentKind>> kinds = {
      {"path k=2", theory::PathKind{2}},
      {"cycle j=1", theory::CycleKind{1}},
      {"cycle j=2", theory::CycleKind{2}}};
  for (const auto& [name, kind] : kinds) {
    const auto est = theory::mc_component_expectation(kind, 0.5, trials,
                                                      derive_seed(opt.seed, "component"));
    rows.push_back(within_3se("component expectation, " + name + ", rho=0.5",
                              {est.estimate, est.std_error},
                              theory::component_expectation(kind, 0.5)));
  }

  {
    bool ok = true;
    for (std::uint64_t i = 0; i < 2000 && ok; ++i) {
      const int n = 8, s = 5;
      const auto pi = Permutation::random(n, derive_seed(opt.seed, "closure/pi", i));
      const auto pit = Permutation::random(n, derive_seed(opt.seed, "closure/pit", i));
      const auto idx1 = sample_subset(n, s, derive_seed(opt.seed, "closure/idx1", i));
      const auto idx2 = sample_subset(n, s, derive_seed(opt.seed, "closure/idx2", i));
      const auto core = theory::core_set(pi, pit, idx1, idx2);
      std::set<Vertex> a, b;
      for (Vertex v : core.vertices) {
        a.insert(pi(idx1[v]));
        b.insert(pit(idx1[v]));
      }
      ok = a == b && std::all_of(a.begin(), a.end(), [&](Vertex w) {
             return std::binary_search(idx2.begin(), idx2.end(), w);
           });
    }
    rows.push_back({"core set images agree and lie in the second sample", ok, "2000 instances"});
  }

  for (int t : {0, 1, 2}) {
    const auto tc = theory::core_set_tail_check(10, 4, t, trials, derive_seed(opt.seed, "tail"));
    rows.push_back({"core set tail P(|I*|=" + std::to_string(t) + ") (n=10,s=4)", !tc.violated,
                    "freq=" + fmt(tc.frequency) + " bound=" + fmt(tc.bound)});
  }

  bool all = true;
  for (const auto& r : rows) {
    all = all && r.pass;
    out << (r.pass ? "PASS  " : "FAIL  ") << r.name;
    if (!r.detail.empty()) out << "  [" << r.detail << "]";
    out << "\n";
  }
  out << (all ? "all checks passed" : "some checks FAILED") << "\n";
  return all;
}
