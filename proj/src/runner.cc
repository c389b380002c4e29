#include "uaeval/runner.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "json.hpp"
#include "uaeval/errors.h"
#include "uaeval/irn.h"
#include "uaeval/pl_gibbs.h"
#include "uaeval/prirn.h"
#include "uaeval/random.h"
#include "uaeval/simple_models.h"

namespace uaeval {
namespace {

namespace fs = std::filesystem;
using MetricKey = std::pair<std::string, int>;

const char* const kModels[] = {"irn", "prirn", "pl", "dirichlet-counts",
                               "gaussian-scores"};

std::string Compact(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

std::string Exact(double value) { return nlohmann::json(value).dump(); }

const char* StageName(RunStage stage) {
  switch (stage) {
    case RunStage::kAggregate:
      return "aggregate";
    case RunStage::kCertainty:
      return "certainty";
    case RunStage::kEvaluate:
      return "evaluate";
  }
  return "?";
}

struct CaseOutcome {
  std::vector<ReportRow> rows;
  // Per-sample values feeding the dataset rows.
  std::map<MetricKey, std::vector<double>> samples;
  std::optional<std::string> error;
};

class CaseEvaluator {
 public:
  CaseEvaluator(const RunConfig& config, const ClassSpace* classes,
                double reliability)
      : config_(config), classes_(classes), reliability_(reliability) {}

  CaseOutcome Evaluate(const CaseRecord& record) const {
    CaseOutcome out;
    const uint64_t seed =
        CaseSeed(config_.seed, config_.model, reliability_, record.case_id);
    auto emit = [&](const std::string& metric, int k,
                    std::vector<double> per_sample) {
      ReportRow row;
      row.kind = "case";
      row.model = config_.model;
      row.reliability = reliability_;
      row.num_samples = config_.num_samples;
      row.seed = seed;
      row.case_id = record.case_id;
      row.metric = metric;
      row.k = k;
      CompensatedSum sum;
      for (double v : per_sample) sum.Add(v);
      row.value = sum.value() / static_cast<double>(per_sample.size());
      out.rows.push_back(std::move(row));
      out.samples[{metric, k}] = std::move(per_sample);
    };

    if (config_.model == "gaussian-scores") {
      EvaluateScores(record, seed, emit);
      return out;
    }
    const PosteriorSamples samples =
        SampleCase(config_, record, reliability_, seed);
    const int num_classes = record.num_classes;

    if (config_.stage == RunStage::kAggregate) {
      const auto mean = samples.Mean();
      const auto variance = samples.Variance();
      for (int c = 0; c < num_classes; ++c) {
        emit("plausibility_mean", c, {mean[c]});
        out.rows.back().sd = std::sqrt(std::max(variance[c], 0.0));
      }
      return out;
    }

    for (int j = 1; j <= std::min(config_.max_certainty_j, num_classes); ++j) {
      emit("annotation_certainty", j, {AnnotationCertaintyTopJ(samples, j)});
    }
    if (record.annotations.size() >= 2) {
      emit("loo_agreement", 0, {LooAgreement(record.annotations)});
    }
    const bool has_risk = classes_ != nullptr &&
                          classes_->size() == num_classes &&
                          classes_->HasCompleteRisk();
    const PredictionSet* prediction =
        config_.stage == RunStage::kEvaluate && record.prediction
            ? &*record.prediction
            : nullptr;
    if (has_risk) {
      const auto risk = classes_->RiskVector();
      const RiskReport report = RiskMetrics(samples, risk, prediction);
      emit("risk_certainty", 0, {report.risk_certainty});
      emit("expected_risk", 0, report.expected_risk);
      if (report.risk_accuracy) {
        emit("risk_accuracy", 0, {*report.risk_accuracy});
      }
    }
    if (prediction == nullptr) return out;
    const int depth_limit =
        std::min<int>(num_classes, prediction->ranked.size());
    for (int k : config_.k_grid) {
      if (k > depth_limit) continue;
      emit("ua_topk_accuracy", k, UaTopKPerSample(samples, *prediction, k));
    }
    for (int k : config_.k_grid) {
      if (k > depth_limit) continue;
      emit("ua_set_accuracy", k,
           UaSetAccuracyPerSample(samples, *prediction, k));
    }
    const int depth = std::min(config_.overlap_depth, depth_limit);
    emit("ua_average_overlap", depth,
         UaAverageOverlapPerSample(samples, *prediction, depth));
    return out;
  }

 private:
  template <typename Emit>
  void EvaluateScores(const CaseRecord& record, uint64_t seed,
                      Emit& emit) const {
    std::vector<double> scores;
    for (const auto& s : record.scores) {
      if (s) scores.push_back(*s);
    }
    if (scores.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "gaussian-scores needs annotation scores");
    }
    const ScoreModel model{MomentMatchedPrior(scores), config_.score_threshold};
    const ThresholdCertainty result =
        ScoreThresholdCertainty(scores, model, config_.num_samples, seed);
    emit("threshold_certainty", 0, {result.certainty});
    emit("prob_below_threshold", 0, {result.mean_prob_below});
  }

  const RunConfig& config_;
  const ClassSpace* classes_;
  double reliability_;
};

std::vector<CaseOutcome> EvaluateAll(const CaseEvaluator& evaluator,
                                     const std::vector<CaseRecord>& records,
                                     int workers) {
  std::vector<CaseOutcome> outcomes(records.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < records.size(); i = next++) {
      try {
        outcomes[i] = evaluator.Evaluate(records[i]);
      } catch (const std::exception& e) {
        outcomes[i] = CaseOutcome{};
        outcomes[i].error = e.what();
      }
    }
  };
  const int threads =
      std::max(1, std::min<int>(workers, static_cast<int>(records.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return outcomes;
}

}  // namespace

std::vector<double> DefaultReliabilityGrid(const std::string& model) {
  if (model == "prirn") return {10, 20, 30, 50, 100};
  if (model == "pl") return {1, 2, 3, 5, 10};
  return {1};
}

void RunConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfigError, what);
  };
  if (std::find(std::begin(kModels), std::end(kModels), model) ==
      std::end(kModels)) {
    fail("unknown model '" + model + "'");
  }
  if (reliabilities.empty()) fail("reliability grid must not be empty");
  for (double r : reliabilities) {
    if (!(r > 0.0) || !std::isfinite(r)) fail("reliabilities must be positive");
    if (model == "pl" && r != std::floor(r)) {
      fail("pl reliabilities are integer repetition counts");
    }
  }
  if (num_samples < 1) fail("M must be >= 1");
  if (burn_in < 0 || thin < 1) fail("need burn_in >= 0 and thin >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) fail("alpha and beta must be positive");
  if (k_grid.empty()) fail("k grid must not be empty");
  for (int k : k_grid) {
    if (k < 1) fail("k grid entries must be >= 1");
  }
  if (overlap_depth < 1) fail("overlap depth must be >= 1");
  if (histogram_bins < 1) fail("histogram needs at least one bin");
  if (max_certainty_j < 1) fail("certainty depth must be >= 1");
  if (!(count_prior >= 0.0)) fail("count prior must be non-negative");
  if (workers < 1) fail("workers must be >= 1");
}

RunConfig RunConfig::ForModel(const std::string& model) {
  RunConfig config;
  config.model = model;
  config.reliabilities = DefaultReliabilityGrid(model);
  return config;
}

uint64_t CaseSeed(uint64_t base_seed, const std::string& model,
                  double reliability, const std::string& case_id) {
  return DeriveSeed(DeriveSeed(base_seed, model + "@" + Exact(reliability)),
                    case_id);
}

PosteriorSamples SampleCase(const RunConfig& config, const CaseRecord& record,
                            double reliability, uint64_t seed) {
  const auto& model = config.model;
  if (model == "irn") {
    const IrnScores irn = IrnAggregate(record.annotations);
    return PosteriorSamples::PointMass(irn.normalized, config.num_samples,
                                       {"irn", reliability, seed});
  }
  if (model == "prirn") {
    return PrIrnSample(record.annotations, reliability, config.num_samples,
                       seed);
  }
  if (model == "pl") {
    GibbsConfig gibbs;
    gibbs.alpha = config.alpha;
    gibbs.beta = config.beta;
    gibbs.burn_in = config.burn_in;
    gibbs.thin = config.thin;
    gibbs.iterations = config.burn_in + config.num_samples * config.thin;
    gibbs.repetitions = static_cast<int>(reliability);
    gibbs.seed = seed;
    return GibbsRun(record.annotations, record.num_classes, gibbs);
  }
  if (model == "dirichlet-counts") {
    // Each annotator votes for every class in their first block.
    LabelCounts counts;
    counts.counts.assign(record.num_classes, 0);
    for (const auto& a : record.annotations) {
      if (a.RankedBlocks().empty()) continue;
      for (ClassId c : a.RankedBlocks().front()) ++counts.counts[c];
    }
    counts.gamma = reliability;
    counts.alpha_prior = config.count_prior;
    return DirichletFromCounts(counts, config.num_samples, seed);
  }
  throw Error(ErrorCode::kConfigError,
              "model '" + model + "' has no plausibility samples");
}

RunResult Run(const RunConfig& config, const std::vector<CaseRecord>& records,
              const ClassSpace* classes) {
  config.Validate();
  fs::create_directories(config.output_dir);
  RunResult result;
  nlohmann::ordered_json manifest;
  manifest["schema_version"] = kReportSchemaVersion;
  manifest["stage"] = StageName(config.stage);
  manifest["model"] = config.model;
  manifest["reliabilities"] = config.reliabilities;
  manifest["num_samples"] = config.num_samples;
  manifest["seed"] = config.seed;
  if (config.model == "pl") {
    manifest["gibbs"] = {{"alpha", config.alpha},
                         {"beta", config.beta},
                         {"burn_in", config.burn_in},
                         {"thin", config.thin}};
    // Settings left at library defaults rather than chosen for the data.
    const RunConfig defaults;
    auto untuned = nlohmann::ordered_json::array();
    if (config.alpha == defaults.alpha) untuned.push_back("alpha");
    if (config.beta == defaults.beta) untuned.push_back("beta");
    if (config.burn_in == defaults.burn_in) untuned.push_back("burn_in");
    if (config.thin == defaults.thin) untuned.push_back("thin");
    manifest["gibbs"]["library_defaults"] = untuned;
  }
  manifest["k_grid"] = config.k_grid;
  manifest["overlap_depth"] = config.overlap_depth;
  manifest["histogram_bins"] = config.histogram_bins;
  manifest["num_cases"] = records.size();

  std::ofstream summary(config.output_dir / "summary.tsv");
  summary << "model\treliability\tmetric\tk\tmean\tsd\tmin\tmax\tnum_cases\n";
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();

  for (double reliability : config.reliabilities) {
    const CaseEvaluator evaluator(config, classes, reliability);
    const auto outcomes = EvaluateAll(evaluator, records, config.workers);

    const std::string name =
        "report_" + config.model + "_" + Compact(reliability) + ".jsonl";
    std::ofstream report(config.output_dir / name);
    std::map<MetricKey, std::vector<std::vector<double>>> by_metric;
    for (size_t i = 0; i < records.size(); ++i) {
      const auto& outcome = outcomes[i];
      if (outcome.error) {
        result.failures.push_back(
            {records[i].case_id, reliability, *outcome.error});
        failures.push_back({{"case_id", records[i].case_id},
                            {"reliability", reliability},
                            {"error", *outcome.error}});
        continue;
      }
      for (const auto& row : outcome.rows) {
        report << FormatReportRow(row) << '\n';
      }
      if (config.stage == RunStage::kAggregate) continue;
      for (const auto& [key, values] : outcome.samples) {
        by_metric[key].push_back(values);
      }
    }
    for (const auto& [key, values] : by_metric) {
      const MetricSummary s = SummarizeMetric(values, config.histogram_bins);
      ReportRow row;
      row.kind = "dataset";
      row.model = config.model;
      row.reliability = reliability;
      row.num_samples = config.num_samples;
      row.seed = config.seed;
      row.metric = key.first;
      row.k = key.second;
      row.value = s.mean;
      row.sd = s.sd;
      row.min = s.min;
      row.max = s.max;
      row.num_cases = static_cast<int>(values.size());
      row.histogram_low = s.histogram_low;
      row.histogram_high = s.histogram_high;
      row.histogram = s.histogram;
      report << FormatReportRow(row) << '\n';
      summary << config.model << '\t' << Exact(reliability) << '\t'
              << key.first << '\t' << key.second << '\t' << Exact(s.mean)
              << '\t' << Exact(s.sd) << '\t' << Exact(s.min) << '\t'
              << Exact(s.max) << '\t' << values.size() << '\n';
    }
    result.reports.push_back(config.output_dir / name);
    reports.push_back(name);
  }
  manifest["reports"] = reports;
  manifest["summary"] = "summary.tsv";
  manifest["failures"] = failures;
  result.summary = config.output_dir / "summary.tsv";
  result.manifest = config.output_dir / "manifest.json";
  std::ofstream(result.manifest) << manifest.dump(2) << '\n';
  return result;
}

}  // namespace uaeval
