#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subcorr/clique_detect.hpp"
#include "subcorr/csv.hpp"
#include "subcorr/error.hpp"
#include "subcorr/exact.hpp"
#include "subcorr/harness.hpp"
#include "subcorr/model.hpp"
#include "subcorr/rng.hpp"
#include "subcorr/similarity.hpp"
#include "theory_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subcorr;

namespace {

json mapping_json(const PartialInjection& pi) {
  json pairs = json::array();
  for (std::size_t k = 0; k < pi.size(); ++k) pairs.push_back({pi.domain[k], pi.image[k]});
  return pairs;
}

// Non-finite values are not valid JSON numbers, so they go out as strings.
json number_json(double x) {
  if (std::isfinite(x)) return x;
  return csv::format_double(x);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << text;
  out.flush();
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

struct GenArgs {
  int n = 50;
  int s = 25;
  double rho = 0.99;
  std::string hypothesis = "alt";
  std::uint64_t seed = 0;
  fs::path out;
};

void run_gen(const GenArgs& a) {
  require(a.n >= 2, ErrorKind::InvalidParameter, "--n must be >= 2");
  require(a.s >= 1 && a.s <= a.n, ErrorKind::InvalidParameter, "--s must satisfy 1 <= s <= n");
  const Hypothesis h = parse_hypothesis(a.hypothesis);
  const auto pair = generate_pair(a.n, a.rho, h, derive_seed(a.seed, "pair"));
  const auto sample = sample_subgraphs(pair, a.s, derive_seed(a.seed, "sample"));

  ensure_dir(a.out);
  write_graph_csv(sample.sub1, a.out / "g1.csv");
  write_graph_csv(sample.sub2, a.out / "g2.csv");

  json meta = {{"n", a.n},
               {"s", a.s},
               {"rho", a.rho},
               {"hypothesis", to_string(h)},
               {"seed", a.seed},
               {"idx1", sample.idx1},
               {"idx2", sample.idx2}};
  if (pair.latent_perm) {
    meta["latent_perm"] = pair.latent_perm->image();
    const auto common = common_vertex_sets(sample, *pair.latent_perm);
    meta["common_s"] = common.s;
    meta["common_t"] = common.t;
  }
  write_text(a.out / "metadata.json", meta.dump(2) + "\n");
  std::cout << "wrote " << (a.out / "g1.csv").string() << ", " << (a.out / "g2.csv").string()
            << ", " << (a.out / "metadata.json").string() << "\n";
}

struct DetectArgs {
  fs::path g1, g2;
  std::string kernel = "mse";
  std::optional<double> rho;
  int m = 12;
  int k1 = 4, k2 = 3, n1 = 10000, n2 = 500;
  std::optional<double> tau;
  std::uint64_t seed = 0;
  std::uint64_t budget = ExactBudget{}.max_evaluations;
};

SimilarityKernel kernel_of(const DetectArgs& a) {
  require(a.kernel != "mle" || a.rho.has_value(), ErrorKind::InvalidParameter,
          "--rho is required for the mle kernel");
  return SimilarityKernel::parse(a.kernel, a.rho.value_or(0.0));
}

// Explicit --tau wins; otherwise the kernel's standard threshold needs --rho.
std::optional<double> threshold_of(const DetectArgs& a, const SimilarityKernel& f) {
  if (a.tau) return a.tau;
  if (!a.rho) return std::nullopt;
  switch (f.kind()) {
    case SimilarityKernel::Kind::Overlap: return threshold_overlap(a.m, *a.rho);
    case SimilarityKernel::Kind::NegHalfSqDiff: return threshold_mse(a.m, *a.rho);
    case SimilarityKernel::Kind::Mle: return std::nullopt;
  }
  return std::nullopt;
}

void run_detect(const DetectArgs& a) {
  const auto f = kernel_of(a);
  const auto sub1 = load_graph_from_edge_list(a.g1);
  const auto sub2 = load_graph_from_edge_list(a.g2);
  require(a.m <= sub2.size(), ErrorKind::InvalidParameter, "--m exceeds the size of g2");
  const auto tau = threshold_of(a, f);
  const AlgoParams p{a.k1, a.k2, a.n1, a.n2, a.m, f, tau.value_or(0.0), a.seed};
  const auto r = detect(sub1, sub2, p);

  json out = {{"statistic", number_json(r.statistic)},
              {"mapping", mapping_json(r.mapping)},
              {"seed_size", r.seed.pi0.size()},
              {"seed_k2_used", r.seed.k2_used}};
  if (tau) {
    out["tau"] = *tau;
    out["decision"] = to_string(decide(r.statistic, *tau));
  }
  std::cout << out.dump(2) << "\n";
}

void run_exact(const DetectArgs& a) {
  const auto f = kernel_of(a);
  const auto sub1 = load_graph_from_edge_list(a.g1);
  const auto sub2 = load_graph_from_edge_list(a.g2);
  require(a.m <= sub2.size(), ErrorKind::InvalidParameter, "--m exceeds the size of g2");
  const auto r = enumerate_max_score(sub1, sub2, a.m, f, ExactBudget{a.budget});
  json out = {{"statistic", number_json(r.score)},
              {"evaluations", r.evaluations},
              {"argmax", mapping_json(r.argmax)}};
  if (const auto tau = threshold_of(a, f)) {
    out["tau"] = *tau;
    out["decision"] = to_string(decide(r.score, *tau));
  }
  std::cout << out.dump(2) << "\n";
}

void write_summaries(const std::vector<TrialRecord>& records, const fs::path& roc_path,
                     const std::optional<fs::path>& hist_prefix, int bins) {
  const auto null_scores = statistics_of(records, Hypothesis::Null);
  const auto alt_scores = statistics_of(records, Hypothesis::Alt);
  const auto curve = roc_points(null_scores, alt_scores);
  emit_csv(curve, roc_path);
  std::cout << "auc=" << csv::format_double(curve.auc) << "\n";
  if (hist_prefix) {
    emit_csv(histogram(null_scores, bins), fs::path(hist_prefix->string() + "_null.csv"));
    emit_csv(histogram(alt_scores, bins), fs::path(hist_prefix->string() + "_alt.csv"));
  }
}

void run_experiment_cmd(const fs::path& config_path) {
  const auto config = load_experiment_config(config_path);
  const auto records = run_experiment(config);
  ensure_dir(config.output_path);
  emit_csv(records, config.output_path / "trials.csv");
  write_summaries(records, config.output_path / "roc.csv", config.output_path / "hist",
                  config.histogram_bins);
  std::cout << "wrote results to " << config.output_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation detection between sampled subgraphs of Gaussian Wigner graphs"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample a graph pair and write its two subgraphs");
  gen_cmd->add_option("--n", gen.n, "Parent graph size")->required();
  gen_cmd->add_option("--s", gen.s, "Sampled vertices per graph")->required();
  gen_cmd->add_option("--rho", gen.rho, "Edge correlation under alt")->required();
  gen_cmd->add_option("--hypothesis", gen.hypothesis, "null or alt")
      ->check(CLI::IsMember({"null", "alt"}));
  gen_cmd->add_option("--seed", gen.seed, "Root seed");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  DetectArgs det;
  auto* det_cmd = app.add_subcommand("detect", "Run the clique-based detector on two graphs");
  auto* ex_cmd = app.add_subcommand("exact", "Compute the exact statistic by enumeration");
  for (auto* cmd : {det_cmd, ex_cmd}) {
    cmd->add_option("--g1", det.g1, "First graph CSV (u,v,weight)")->required();
    cmd->add_option("--g2", det.g2, "Second graph CSV (u,v,weight)")->required();
    cmd->add_option("--kernel", det.kernel, "overlap, mse or mle")
        ->check(CLI::IsMember({"overlap", "mse", "mle"}));
    cmd->add_option("--rho", det.rho, "Correlation for the mle kernel and default threshold");
    cmd->add_option("--m", det.m, "Mapping size")->required();
    cmd->add_option("--tau", det.tau, "Decision threshold");
  }
  det_cmd->add_option("--k1", det.k1, "Clique size");
  det_cmd->add_option("--k2", det.k2, "Cliques merged into the seed");
  det_cmd->add_option("--n1", det.n1, "Sampled cliques");
  det_cmd->add_option("--n2", det.n2, "Cliques kept after ranking");
  det_cmd->add_option("--seed", det.seed, "Seed for clique sampling");
  ex_cmd->add_option("--budget", det.budget, "Maximum mapping evaluations");

  fs::path config_path;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment from JSON");
  exp_cmd->add_option("--config", config_path, "Experiment config")->required();

  TheoryCheckOptions tc;
  auto* tc_cmd = app.add_subcommand("theory-check", "Run the verification battery");
  tc_cmd->add_option("--trials", tc.trials, "Monte Carlo trials per check");
  tc_cmd->add_option("--seed", tc.seed, "Root seed");

  fs::path roc_in, roc_out;
  std::optional<fs::path> hist_prefix;
  int bins = 20;
  auto* roc_cmd = app.add_subcommand("roc", "Compute ROC and AUC from a trials CSV");
  roc_cmd->add_option("--in", roc_in, "Trials CSV")->required();
  roc_cmd->add_option("--out", roc_out, "ROC CSV")->required();
  roc_cmd->add_option("--hist", hist_prefix, "Also write <prefix>_null.csv and <prefix>_alt.csv");
  roc_cmd->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    else if (*det_cmd) run_detect(det);
    else if (*ex_cmd) run_exact(det);
    else if (*exp_cmd) run_experiment_cmd(config_path);
    else if (*tc_cmd) return run_theory_check(tc, std::cout) ? 0 : 1;
    else if (*roc_cmd) {
      const auto records = read_trials_csv(roc_in);
      write_summaries(records, roc_out, hist_prefix, bins);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
