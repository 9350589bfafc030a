#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subcorr/clique_detect.hpp"
#include "subcorr/exact.hpp"
#include "subcorr/model.hpp"
#include "subcorr/similarity.hpp"

namespace subcorr {

struct ExactDetector {
  ExactBudget budget;
};

// m and seed inside the clique parameters are ignored; run_experiment sets
// them per trial.
struct CliqueDetector {
  int k1 = 4;
  int k2 = 3;
  int n1 = 10000;
  int n2 = 500;
};

using DetectorConfig = std::variant<ExactDetector, CliqueDetector>;

struct ExperimentConfig {
  int n = 50;
  int s = 25;
  double rho = 0.99;
  double epsilon = 0.01;
  int trials_per_hypothesis = 100;
  DetectorConfig detector = CliqueDetector{};
  SimilarityKernel kernel = SimilarityKernel::neg_half_sq_diff();
  std::uint64_t root_seed = 0;
  std::filesystem::path output_path;
  // Explicit mapping size; when absent, floor((1 - eps) s^2 / n) is used.
  std::optional<int> mapping_size;
  // Explicit threshold; when absent the kernel's standard threshold at
  // (m, rho) is used (overlap / mse only).
  std::optional<double> tau;
  unsigned workers = 0;  // 0 = hardware concurrency
  int histogram_bins = 20;
};

// Resolved mapping size; throws sample-too-small when it is below 2.
int effective_mapping_size(const ExperimentConfig& config);
double effective_tau(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

struct TrialRecord {
  int trial_index = 0;
  Hypothesis hypothesis = Hypothesis::Null;
  double statistic = 0.0;
  Decision decision = Decision::AcceptNull;
  double wall_time = 0.0;  // seconds
};

std::uint64_t trial_seed(std::uint64_t root_seed, Hypothesis h, int trial_index);

// Runs one trial: fresh pair, fresh samples, configured detector.
TrialRecord run_trial(const ExperimentConfig& config, Hypothesis h, int trial_index);

// All Null trials then all Alt trials, each ordered by trial index,
// regardless of how many workers ran them.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

std::vector<double> statistics_of(const std::vector<TrialRecord>& records, Hypothesis h);

// Mann-Whitney estimate of P(alt > null) with ties counted one half.
double auc(const std::vector<double>& scores_null, const std::vector<double>& scores_alt);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // thresholds descending: +inf ... -inf
  double auc = 0.0;              // trapezoidal area under the points
};

// Reject iff score >= threshold, swept over every distinct pooled score plus
// +/- infinity.
RocCurve roc_points(const std::vector<double>& scores_null,
                    const std::vector<double>& scores_alt);

struct HistogramBin {
  double left_edge = 0.0;
  long long count = 0;
};

std::vector<HistogramBin> histogram(const std::vector<double>& scores, int bin_count);

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path);
void emit_csv(const RocCurve& curve, const std::filesystem::path& path);
void emit_csv(const std::vector<HistogramBin>& bins, const std::filesystem::path& path);

std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path);

RocCurve read_roc_csv(const std::filesystem::path& path);
std::vector<HistogramBin> read_histogram_csv(const std::filesystem::path& path);

}  // namespace subcorr
