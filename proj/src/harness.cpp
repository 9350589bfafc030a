#include "subcorr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "subcorr/csv.hpp"
#include "subcorr/error.hpp"
#include "subcorr/parallel.hpp"
#include "subcorr/rng.hpp"

namespace subcorr {
namespace {

using nlohmann::json;

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  require(static_cast<bool>(out), ErrorKind::Io, "write failed: " + path.string());
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  return in;
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidParameter, std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return key == k; });
    require(ok, ErrorKind::InvalidParameter, "unknown " + where + " key '" + key + "'");
  }
}

}  // namespace

int effective_mapping_size(const ExperimentConfig& config) {
  const int m = config.mapping_size ? *config.mapping_size
                                    : mapping_size_m(config.n, config.s, config.epsilon);
  require(m >= 2, ErrorKind::SampleTooSmall,
          "mapping size m=" + std::to_string(m) + " is below 2; the statistic is degenerate");
  return m;
}

double effective_tau(const ExperimentConfig& config) {
  if (config.tau) return *config.tau;
  const int m = effective_mapping_size(config);
  switch (config.kernel.kind()) {
    case SimilarityKernel::Kind::Overlap:
      return threshold_overlap(m, config.rho);
    case SimilarityKernel::Kind::NegHalfSqDiff:
      return threshold_mse(m, config.rho);
    case SimilarityKernel::Kind::Mle:
      break;
  }
  fail(ErrorKind::InvalidParameter, "the mle kernel has no default threshold; set tau");
}

void validate(const ExperimentConfig& c) {
  require(c.n >= 2, ErrorKind::InvalidParameter, "n must be >= 2");
  require(c.s >= 1 && c.s <= c.n, ErrorKind::InvalidParameter, "s must satisfy 1 <= s <= n");
  require(c.rho > 0.0 && c.rho < 1.0, ErrorKind::InvalidParameter, "rho must lie in (0,1)");
  require(c.epsilon > 0.0 && c.epsilon < 1.0, ErrorKind::InvalidParameter,
          "epsilon must lie in (0,1)");
  require(c.trials_per_hypothesis >= 1, ErrorKind::InvalidParameter,
          "trials_per_hypothesis must be positive");
  require(c.histogram_bins >= 1, ErrorKind::InvalidParameter, "histogram_bins must be >= 1");
  const int m = effective_mapping_size(c);
  require(m <= c.s, ErrorKind::InvalidParameter, "mapping size exceeds s");
  effective_tau(c);
  if (const auto* cd = std::get_if<CliqueDetector>(&c.detector)) {
    AlgoParams p{cd->k1, cd->k2, cd->n1, cd->n2, m, c.kernel, 0.0, 0};
    validate(p, c.s);
  } else {
    require(std::get<ExactDetector>(c.detector).budget.max_evaluations >= 1,
            ErrorKind::InvalidParameter, "exact budget must be >= 1");
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::Parse, "config must be a JSON object");
  reject_unknown_keys(j,
                      {"n", "s", "rho", "epsilon", "trials_per_hypothesis", "detector",
                       "kernel", "kernel_rho", "root_seed", "output_path", "m", "tau",
                       "workers", "histogram_bins"},
                      "config");

  ExperimentConfig c;
  c.n = get_field<int>(j, "n");
  c.s = get_field<int>(j, "s");
  c.rho = get_field<double>(j, "rho");
  c.epsilon = j.contains("epsilon") ? get_field<double>(j, "epsilon") : 0.01;
  c.trials_per_hypothesis = get_field<int>(j, "trials_per_hypothesis");
  c.root_seed = j.contains("root_seed") ? get_field<std::uint64_t>(j, "root_seed") : 0;
  c.output_path = get_field<std::string>(j, "output_path");

  const auto kernel = j.contains("kernel") ? get_field<std::string>(j, "kernel") : "mse";
  const double kernel_rho = j.contains("kernel_rho") ? get_field<double>(j, "kernel_rho") : c.rho;
  c.kernel = SimilarityKernel::parse(kernel, kernel_rho);

  if (j.contains("m")) c.mapping_size = get_field<int>(j, "m");
  if (j.contains("tau")) c.tau = get_field<double>(j, "tau");
  if (j.contains("workers")) c.workers = get_field<unsigned>(j, "workers");
  if (j.contains("histogram_bins")) c.histogram_bins = get_field<int>(j, "histogram_bins");

  const json det = j.contains("detector") ? j.at("detector") : json{{"type", "clique"}};
  require(det.is_object(), ErrorKind::InvalidParameter, "detector must be an object");
  const auto type = get_field<std::string>(det, "type");
  if (type == "clique") {
    reject_unknown_keys(det, {"type", "k1", "k2", "n1", "n2"}, "detector");
    CliqueDetector cd;
    if (det.contains("k1")) cd.k1 = get_field<int>(det, "k1");
    if (det.contains("k2")) cd.k2 = get_field<int>(det, "k2");
    if (det.contains("n1")) cd.n1 = get_field<int>(det, "n1");
    if (det.contains("n2")) cd.n2 = get_field<int>(det, "n2");
    c.detector = cd;
  } else if (type == "exact") {
    reject_unknown_keys(det, {"type", "budget"}, "detector");
    ExactDetector ed;
    if (det.contains("budget")) ed.budget.max_evaluations = get_field<std::uint64_t>(det, "budget");
    c.detector = ed;
  } else {
    fail(ErrorKind::InvalidParameter, "detector type must be 'clique' or 'exact'");
  }
  validate(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::uint64_t trial_seed(std::uint64_t root_seed, Hypothesis h, int trial_index) {
  return derive_seed(root_seed, h == Hypothesis::Null ? "trial/null" : "trial/alt",
                     static_cast<std::uint64_t>(trial_index));
}

TrialRecord run_trial(const ExperimentConfig& config, Hypothesis h, int trial_index) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = trial_seed(config.root_seed, h, trial_index);
  const int m = effective_mapping_size(config);
  const double tau = effective_tau(config);

  const auto pair = generate_pair(config.n, config.rho, h, derive_seed(seed, "pair"));
  const auto sample = sample_subgraphs(pair, config.s, derive_seed(seed, "sample"));

  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.hypothesis = h;
  if (const auto* cd = std::get_if<CliqueDetector>(&config.detector)) {
    AlgoParams p{cd->k1, cd->k2, cd->n1, cd->n2, m, config.kernel, tau,
                 derive_seed(seed, "detector")};
    rec.statistic = detect(sample.sub1, sample.sub2, p).statistic;
  } else {
    const auto& ed = std::get<ExactDetector>(config.detector);
    rec.statistic = enumerate_max_score(sample.sub1, sample.sub2, m, config.kernel, ed.budget).score;
  }
  require(std::isfinite(rec.statistic), ErrorKind::Internal, "non-finite statistic");
  rec.decision = decide(rec.statistic, tau);
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const int trials = config.trials_per_hypothesis;
  const std::size_t total = 2 * static_cast<std::size_t>(trials);
  std::vector<TrialRecord> records(total);
  std::vector<std::optional<Error>> errors(total);

  const unsigned workers = config.workers ? config.workers : default_workers();
  parallel_for(total, workers, [&](std::size_t i) {
    const Hypothesis h = i < static_cast<std::size_t>(trials) ? Hypothesis::Null : Hypothesis::Alt;
    const int index = static_cast<int>(i % trials);
    try {
      records[i] = run_trial(config, h, index);
    } catch (const Error& e) {
      errors[i] = e;
    }
  });

  std::size_t failed = 0;
  const Error* first = nullptr;
  std::size_t first_index = 0;
  for (std::size_t i = 0; i < total; ++i)
    if (errors[i]) {
      if (!first) {
        first = &*errors[i];
        first_index = i;
      }
      ++failed;
    }
  if (first)
    throw Error(first->kind(),
                std::to_string(failed) + " of " + std::to_string(total) +
                    " trials failed; first: trial " + std::to_string(first_index % trials) +
                    " (" + (first_index < static_cast<std::size_t>(trials) ? "null" : "alt") +
                    "): " + first->what());
  return records;
}

std::vector<double> statistics_of(const std::vector<TrialRecord>& records, Hypothesis h) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.hypothesis == h) out.push_back(r.statistic);
  return out;
}

double auc(const std::vector<double>& scores_null, const std::vector<double>& scores_alt) {
  require(!scores_null.empty() && !scores_alt.empty(), ErrorKind::InvalidParameter,
          "AUC needs nonempty score lists");
  std::vector<double> sorted = scores_null;
  std::sort(sorted.begin(), sorted.end());
  double wins = 0.0;
  for (double a : scores_alt) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), a);
    const auto hi = std::upper_bound(lo, sorted.end(), a);
    wins += static_cast<double>(lo - sorted.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(scores_null.size()) * static_cast<double>(scores_alt.size()));
}

RocCurve roc_points(const std::vector<double>& scores_null,
                    const std::vector<double>& scores_alt) {
  require(!scores_null.empty() && !scores_alt.empty(), ErrorKind::InvalidParameter,
          "ROC needs nonempty score lists");
  std::vector<double> thresholds = scores_null;
  thresholds.insert(thresholds.end(), scores_alt.begin(), scores_alt.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  auto rate = [](const std::vector<double>& scores, double tau) {
    const auto hits = std::count_if(scores.begin(), scores.end(),
                                    [tau](double x) { return x >= tau; });
    return static_cast<double>(hits) / static_cast<double>(scores.size());
  };

  RocCurve curve;
  constexpr double inf = std::numeric_limits<double>::infinity();
  curve.points.push_back({inf, 0.0, 0.0});
  for (double tau : thresholds)
    curve.points.push_back({tau, rate(scores_null, tau), rate(scores_alt, tau)});
  curve.points.push_back({-inf, 1.0, 1.0});

  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i - 1];
    const auto& q = curve.points[i];
    area += (q.fpr - p.fpr) * (q.tpr + p.tpr) / 2.0;
  }
  curve.auc = area;
  return curve;
}

std::vector<HistogramBin> histogram(const std::vector<double>& scores, int bin_count) {
  require(!scores.empty(), ErrorKind::InvalidParameter, "histogram needs scores");
  require(bin_count >= 1, ErrorKind::InvalidParameter, "histogram needs >= 1 bin");
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double width = (*hi_it - lo) / bin_count;
  std::vector<HistogramBin> bins(bin_count);
  for (int b = 0; b < bin_count; ++b) bins[b].left_edge = lo + b * width;
  for (double x : scores) {
    int b = width > 0.0 ? static_cast<int>(std::floor((x - lo) / width)) : 0;
    b = std::clamp(b, 0, bin_count - 1);
    ++bins[b].count;
  }
  return bins;
}

void emit_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "trial,hypothesis,statistic,decision,wall_time_s\n";
  for (const auto& r : records)
    out << r.trial_index << ',' << to_string(r.hypothesis) << ','
        << csv::format_double(r.statistic) << ',' << to_string(r.decision) << ','
        << csv::format_double(r.wall_time) << '\n';
  finish(out, path);
}

void emit_csv(const RocCurve& curve, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points)
    out << csv::format_double(p.threshold) << ',' << csv::format_double(p.fpr) << ','
        << csv::format_double(p.tpr) << '\n';
  out << "# auc=" << csv::format_double(curve.auc) << '\n';
  finish(out, path);
}

void emit_csv(const std::vector<HistogramBin>& bins, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "bin_left,count\n";
  for (const auto& b : bins) out << csv::format_double(b.left_edge) << ',' << b.count << '\n';
  finish(out, path);
}

namespace {

// Calls row(fields, where) for each non-empty, non-comment line after the
// expected header.
template <typename Row>
void read_csv(const std::filesystem::path& path, std::string_view header, Row&& row) {
  auto in = open_for_read(path);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!saw_header) {
      require(text == header, ErrorKind::Parse,
              where + ": expected header '" + std::string(header) + "'");
      saw_header = true;
      continue;
    }
    try {
      row(csv::split(text), where);
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::Parse, where + ": " + e.what());
    }
  }
  require(saw_header, ErrorKind::Parse, path.string() + ": missing header");
}

}  // namespace

std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path) {
  std::vector<TrialRecord> out;
  read_csv(path, "trial,hypothesis,statistic,decision,wall_time_s",
           [&](const std::vector<std::string_view>& f, const std::string& where) {
             require(f.size() == 5, ErrorKind::Parse, where + ": expected 5 fields");
             TrialRecord r;
             r.trial_index = static_cast<int>(csv::parse_int(f[0]));
             const auto h = csv::trim(f[1]);
             require(h == "null" || h == "alt", ErrorKind::Parse,
                     where + ": hypothesis must be null|alt");
             r.hypothesis = h == "null" ? Hypothesis::Null : Hypothesis::Alt;
             r.statistic = csv::parse_double(f[2]);
             const auto d = csv::trim(f[3]);
             require(d == "reject" || d == "accept", ErrorKind::Parse,
                     where + ": decision must be reject|accept");
             r.decision = d == "reject" ? Decision::RejectNull : Decision::AcceptNull;
             r.wall_time = csv::parse_double(f[4]);
             out.push_back(r);
           });
  return out;
}

RocCurve read_roc_csv(const std::filesystem::path& path) {
  RocCurve curve;
  bool have_auc = false;
  {
    auto in = open_for_read(path);
    std::string line;
    while (std::getline(in, line)) {
      const auto text = csv::trim(line);
      if (text.starts_with("# auc=")) {
        try {
          curve.auc = csv::parse_double(text.substr(6));
        } catch (const std::invalid_argument& e) {
          fail(ErrorKind::Parse, path.string() + ": bad auc comment: " + e.what());
        }
        have_auc = true;
      }
    }
  }
  require(have_auc, ErrorKind::Parse, path.string() + ": missing '# auc=' row");
  read_csv(path, "threshold,fpr,tpr",
           [&](const std::vector<std::string_view>& f, const std::string& where) {
             require(f.size() == 3, ErrorKind::Parse, where + ": expected 3 fields");
             curve.points.push_back(
                 {csv::parse_double(f[0]), csv::parse_double(f[1]), csv::parse_double(f[2])});
           });
  return curve;
}

std::vector<HistogramBin> read_histogram_csv(const std::filesystem::path& path) {
  std::vector<HistogramBin> out;
  read_csv(path, "bin_left,count",
           [&](const std::vector<std::string_view>& f, const std::string& where) {
             require(f.size() == 2, ErrorKind::Parse, where + ": expected 2 fields");
             out.push_back({csv::parse_double(f[0]), csv::parse_int(f[1])});
           });
  return out;
}

}  // namespace subcorr
