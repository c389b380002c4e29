#ifndef UAEVAL_RUNNER_H_
#define UAEVAL_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uaeval/io.h"
#include "uaeval/posterior.h"
#include "uaeval/rankings.h"

namespace uaeval {

enum class RunStage {
  // Per-class posterior mean and SD of the plausibilities.
  kAggregate,
  // Annotation certainty (top-1..top-3) and risk certainty.
  kCertainty,
  // Certainty plus uncertainty-adjusted metrics against predictions.
  kEvaluate,
};

struct RunConfig {
  // irn, prirn, pl, dirichlet-counts or gaussian-scores.
  std::string model = "prirn";
  // PrIRN gamma, PL repetitions or Dirichlet-from-counts gamma. Must not be
  // empty; see DefaultReliabilityGrid.
  std::vector<double> reliabilities = {10, 20, 30, 50, 100};
  int num_samples = 1000;
  int burn_in = 500;
  int thin = 1;
  double alpha = 1.0;
  double beta = 1.0;
  uint64_t seed = 0;
  std::vector<int> k_grid = {1, 2, 3};
  int overlap_depth = 3;
  int histogram_bins = 10;
  int max_certainty_j = 3;
  // gaussian-scores: outcome threshold.
  double score_threshold = 0.0;
  // dirichlet-counts: pseudo-count added to every class.
  double count_prior = 0.01;
  int workers = 1;
  RunStage stage = RunStage::kEvaluate;
  std::filesystem::path output_dir = "uaeval_out";

  // Throws ConfigError.
  void Validate() const;

  // Defaults for `model`, including its reliability grid.
  static RunConfig ForModel(const std::string& model);
};

std::vector<double> DefaultReliabilityGrid(const std::string& model);

// Posterior samples for one case under one model and reliability. The
// gaussian-scores model has no plausibility vector and is rejected here.
PosteriorSamples SampleCase(const RunConfig& config, const CaseRecord& record,
                            double reliability, uint64_t seed);

// Seed for (model, reliability, case): independent of scheduling.
uint64_t CaseSeed(uint64_t base_seed, const std::string& model,
                  double reliability, const std::string& case_id);

struct CaseFailure {
  std::string case_id;
  double reliability = 0.0;
  std::string error;
};

struct RunResult {
  std::vector<std::filesystem::path> reports;
  std::filesystem::path manifest;
  std::filesystem::path summary;
  std::vector<CaseFailure> failures;
};

// Writes one report per reliability, summary.tsv and manifest.json under
// config.output_dir. Failing cases are skipped and listed in the manifest.
RunResult Run(const RunConfig& config, const std::vector<CaseRecord>& records,
              const ClassSpace* classes = nullptr);

}  // namespace uaeval

#endif  // UAEVAL_RUNNER_H_
