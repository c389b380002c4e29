#include "uaeval/runner.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "test_util.h"
#include "uaeval/sim_oracle.h"

namespace uaeval {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = UAEVAL_FIXTURE_DIR;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("uaeval_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

// Random cases with partial annotations and a full prediction.
std::vector<CaseRecord> SyntheticCases(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<CaseRecord> records;
  for (int i = 0; i < n; ++i) {
    CaseRecord r;
    r.case_id = "case-" + std::to_string(i);
    r.num_classes = 3 + static_cast<int>(rng() % 4);
    const int annotators = 1 + static_cast<int>(rng() % 4);
    for (int a = 0; a < annotators; ++a) {
      PartialRanking ranking = RandomPartialRanking(r.num_classes, 2, rng);
      if (ranking.RankedBlocks().empty()) {
        ranking = PartialRanking::Create(r.num_classes, {{0}});
      }
      r.annotator_ids.push_back("a" + std::to_string(a));
      r.annotations.push_back(ranking);
      r.scores.push_back(std::nullopt);
    }
    PredictionSet p;
    p.case_id = r.case_id;
    for (int c = r.num_classes - 1; c >= 0; --c) p.ranked.push_back(c);
    r.prediction = p;
    records.push_back(std::move(r));
  }
  return records;
}

std::map<std::string, std::string> DirContents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    out[entry.path().filename().string()] = Slurp(entry.path());
  }
  return out;
}

TEST(RunConfigTest, Validation) {
  RunConfig config;
  EXPECT_NO_THROW(config.Validate());
  config.reliabilities.clear();
  EXPECT_UAEVAL_ERROR(config.Validate(), ErrorCode::kConfigError);

  auto pl = RunConfig::ForModel("pl");
  EXPECT_EQ(pl.reliabilities, (std::vector<double>{1, 2, 3, 5, 10}));
  pl.reliabilities = {2.5};
  EXPECT_UAEVAL_ERROR(pl.Validate(), ErrorCode::kConfigError);

  auto bad = RunConfig::ForModel("magic");
  EXPECT_UAEVAL_ERROR(bad.Validate(), ErrorCode::kConfigError);
  config = RunConfig{};
  config.num_samples = 0;
  EXPECT_UAEVAL_ERROR(config.Validate(), ErrorCode::kConfigError);
  config = RunConfig{};
  config.k_grid = {0};
  EXPECT_UAEVAL_ERROR(config.Validate(), ErrorCode::kConfigError);
  config = RunConfig{};
  config.reliabilities = {-1};
  EXPECT_UAEVAL_ERROR(config.Validate(), ErrorCode::kConfigError);
}

TEST(CaseSeedTest, DependsOnEveryKeyPart) {
  const uint64_t s = CaseSeed(1, "pl", 3, "a");
  EXPECT_EQ(s, CaseSeed(1, "pl", 3, "a"));
  EXPECT_NE(s, CaseSeed(2, "pl", 3, "a"));
  EXPECT_NE(s, CaseSeed(1, "prirn", 3, "a"));
  EXPECT_NE(s, CaseSeed(1, "pl", 5, "a"));
  EXPECT_NE(s, CaseSeed(1, "pl", 3, "b"));
}

TEST(SampleCaseTest, ModelsProduceSimplexSamples) {
  const auto records = SyntheticCases(3, 5);
  for (const char* model : {"irn", "prirn", "pl", "dirichlet-counts"}) {
    auto config = RunConfig::ForModel(model);
    config.num_samples = 50;
    config.burn_in = 20;
    for (const auto& r : records) {
      const auto samples =
          SampleCase(config, r, config.reliabilities.front(), 3);
      ASSERT_EQ(samples.num_samples(), 50) << model;
      for (int m = 0; m < 50; ++m) {
        double total = 0;
        for (int c = 0; c < r.num_classes; ++c) total += samples.Sample(m)[c];
        EXPECT_NEAR(total, 1.0, 1e-9) << model;
      }
    }
  }
  auto scores = RunConfig::ForModel("gaussian-scores");
  EXPECT_UAEVAL_ERROR(SampleCase(scores, records[0], 1, 0),
                      ErrorCode::kConfigError);
}

TEST(RunTest, WritesReportsSummaryAndManifest) {
  const auto records = SyntheticCases(6, 11);
  auto config = RunConfig::ForModel("prirn");
  config.reliabilities = {10, 50};
  config.num_samples = 100;
  config.output_dir = TempDir("layout");
  const RunResult result = uaeval::Run(config, records);
  ASSERT_EQ(result.reports.size(), 2u);
  EXPECT_TRUE(result.failures.empty());
  EXPECT_EQ(result.reports[0].filename(), "report_prirn_10.jsonl");

  const auto rows = ReadReport(result.reports[1]);
  int case_rows = 0, dataset_rows = 0;
  for (const auto& row : rows) {
    EXPECT_EQ(row.model, "prirn");
    EXPECT_EQ(row.reliability, 50);
    EXPECT_EQ(row.num_samples, 100);
    if (row.kind == "case") {
      ++case_rows;
      EXPECT_FALSE(row.case_id.empty());
      EXPECT_EQ(row.seed, CaseSeed(0, "prirn", 50, row.case_id));
    } else {
      ++dataset_rows;
      EXPECT_EQ(row.num_cases.value_or(0) > 0, true);
      EXPECT_LE(*row.min, row.value + 1e-15);
      EXPECT_GE(*row.max, row.value - 1e-15);
      int total = 0;
      for (int h : row.histogram) total += h;
      // Per-sample metrics bin M dataset means; scalar metrics bin one.
      EXPECT_TRUE(total == 100 || total == 1) << row.metric;
      EXPECT_EQ(row.histogram.size(), 10u);
    }
  }
  EXPECT_GT(case_rows, 6 * 3);
  EXPECT_GT(dataset_rows, 3);

  const std::string summary = Slurp(result.summary);
  EXPECT_EQ(summary.substr(0, summary.find('\n')),
            "model\treliability\tmetric\tk\tmean\tsd\tmin\tmax\tnum_cases");
  const auto manifest = nlohmann::json::parse(Slurp(result.manifest));
  EXPECT_EQ(manifest["model"], "prirn");
  EXPECT_EQ(manifest["num_cases"], 6);
  EXPECT_EQ(manifest["reports"].size(), 2u);
  EXPECT_FALSE(manifest.contains("workers"));
  EXPECT_FALSE(manifest.contains("gibbs"));
  fs::remove_all(config.output_dir);
}

TEST(RunTest, ByteIdenticalAcrossRerunsAndWorkers) {
  const auto records = SyntheticCases(12, 21);
  for (const char* model : {"prirn", "pl"}) {
    auto config = RunConfig::ForModel(model);
    config.reliabilities = {config.reliabilities[0], config.reliabilities[2]};
    config.num_samples = 60;
    config.burn_in = 30;
    config.seed = 99;
    config.output_dir = TempDir("w1");
    uaeval::Run(config, records);
    const auto first = DirContents(config.output_dir);
    uaeval::Run(config, records);
    EXPECT_EQ(DirContents(config.output_dir), first) << model;
    config.workers = 8;
    config.output_dir = TempDir("w8");
    uaeval::Run(config, records);
    EXPECT_EQ(DirContents(config.output_dir), first) << model;
    fs::remove_all(TempDir("w1"));
    fs::remove_all(TempDir("w8"));
  }
}

TEST(RunTest, FailingCaseIsSkippedAndListed) {
  auto records = SyntheticCases(4, 3);
  CaseRecord empty;
  empty.case_id = "no-signal";
  empty.num_classes = 3;
  empty.annotator_ids = {"x"};
  empty.annotations = {PartialRanking::Create(3, {})};
  empty.scores = {std::nullopt};
  records.insert(records.begin() + 2, empty);
  auto config = RunConfig::ForModel("irn");
  config.num_samples = 10;
  config.output_dir = TempDir("failure");
  const auto result = uaeval::Run(config, records);
  ASSERT_EQ(result.failures.size(), 1u);
  EXPECT_EQ(result.failures[0].case_id, "no-signal");
  EXPECT_NE(result.failures[0].error.find("AllZeroMass"), std::string::npos)
      << result.failures[0].error;
  for (const auto& row : ReadReport(result.reports[0])) {
    EXPECT_NE(row.case_id, "no-signal");
    if (row.kind == "dataset") EXPECT_EQ(*row.num_cases, 4);
  }
  const auto manifest = nlohmann::json::parse(Slurp(result.manifest));
  EXPECT_EQ(manifest["failures"].size(), 1u);
  fs::remove_all(config.output_dir);
}

TEST(RunTest, AggregateStageEmitsPlausibilities) {
  const auto records = SyntheticCases(3, 8);
  auto config = RunConfig::ForModel("prirn");
  config.reliabilities = {20};
  config.stage = RunStage::kAggregate;
  config.num_samples = 200;
  config.output_dir = TempDir("aggregate");
  const auto result = uaeval::Run(config, records);
  std::map<std::string, double> totals;
  for (const auto& row : ReadReport(result.reports[0])) {
    ASSERT_EQ(row.kind, "case");
    ASSERT_EQ(row.metric, "plausibility_mean");
    EXPECT_TRUE(row.sd.has_value());
    totals[row.case_id] += row.value;
  }
  ASSERT_EQ(totals.size(), 3u);
  for (const auto& [id, total] : totals) EXPECT_NEAR(total, 1.0, 1e-9) << id;
  fs::remove_all(config.output_dir);
}

TEST(RunTest, DermFixtureUnderPl) {
  const auto classes = LoadClassSpace(kFixtures / "derm_case" / "classes.json");
  const auto records =
      Ingest(kFixtures / "derm_case" / "cases.jsonl",
             kFixtures / "derm_case" / "annotations.jsonl",
             kFixtures / "derm_case" / "predictions_model_b.jsonl", &classes);
  auto config = RunConfig::ForModel("pl");
  config.reliabilities = {3};
  config.output_dir = TempDir("derm");
  const auto result = uaeval::Run(config, records, &classes);
  std::map<std::pair<std::string, int>, double> value;
  for (const auto& row : ReadReport(result.reports[0])) {
    if (row.kind == "case") value[std::make_pair(row.metric, row.k)] = row.value;
  }
  EXPECT_GT(value.at({"ua_topk_accuracy", 3}), 0.95);
  EXPECT_GE(value.at({"ua_topk_accuracy", 3}), value.at({"ua_topk_accuracy", 1}));
  EXPECT_TRUE(value.count({"risk_certainty", 0}));
  EXPECT_TRUE(value.count({"risk_accuracy", 0}));
  EXPECT_TRUE(value.count({"loo_agreement", 0}));
  EXPECT_TRUE(value.count({"ua_average_overlap", 3}));
  const auto manifest = nlohmann::json::parse(Slurp(result.manifest));
  EXPECT_EQ(manifest["gibbs"]["burn_in"], 500);
  EXPECT_EQ(manifest["gibbs"]["library_defaults"].size(), 4u);
  fs::remove_all(config.output_dir);
}

TEST(RunTest, CountsAndScoreModels) {
  auto records = SyntheticCases(3, 4);
  for (auto& r : records) {
    for (size_t a = 0; a < r.scores.size(); ++a) r.scores[a] = 0.3 * a - 0.2;
  }
  auto counts = RunConfig::ForModel("dirichlet-counts");
  counts.output_dir = TempDir("counts");
  counts.num_samples = 100;
  EXPECT_TRUE(uaeval::Run(counts, records).failures.empty());
  fs::remove_all(counts.output_dir);

  auto scores = RunConfig::ForModel("gaussian-scores");
  scores.output_dir = TempDir("scores");
  scores.num_samples = 500;
  const auto result = uaeval::Run(scores, records);
  EXPECT_TRUE(result.failures.empty());
  for (const auto& row : ReadReport(result.reports[0])) {
    EXPECT_TRUE(row.metric == "threshold_certainty" ||
                row.metric == "prob_below_threshold")
        << row.metric;
    if (row.kind == "case" && row.metric == "threshold_certainty") {
      EXPECT_GE(row.value, 0.5);
      EXPECT_LE(row.value, 1.0);
    }
  }
  fs::remove_all(scores.output_dir);
}

}  // namespace
}  // namespace uaeval
