// Command-line front end: aggregate, certainty, evaluate, simulate, selfcheck.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uaeval/errors.h"
#include "uaeval/io.h"
#include "uaeval/random.h"
#include "uaeval/runner.h"
#include "uaeval/selfcheck.h"
#include "uaeval/sim_oracle.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitSelfcheck = 3;

constexpr char kOutputDirEnv[] = "UAEVAL_OUTPUT_DIR";

fs::path DefaultOutputDir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("uaeval_out");
}

template <typename T>
std::vector<T> ParseList(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::stringstream cell(item);
    T value;
    if (!(cell >> value) || !(cell >> std::ws).eof()) {
      throw uaeval::Error(uaeval::ErrorCode::kConfigError,
                          flag + ": cannot parse '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

struct RunFlags {
  std::string cases;
  std::string annotations;
  std::string predictions;
  std::string classes;
  std::string model = "prirn";
  std::optional<std::string> reliabilities;
  std::string k_grid = "1,2,3";
  uaeval::RunConfig config;
};

void AddRunFlags(CLI::App* cmd, RunFlags& flags, bool want_predictions) {
  auto& c = flags.config;
  c.output_dir.clear();
  cmd->add_option("--cases", flags.cases, "Line-delimited case records")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--annotations", flags.annotations,
                  "Line-delimited annotation records")
      ->required()
      ->check(CLI::ExistingFile);
  if (want_predictions) {
    cmd->add_option("--predictions", flags.predictions,
                    "Line-delimited prediction records")
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--classes", flags.classes,
                  "JSON class list with names and risk levels")
      ->check(CLI::ExistingFile);
  cmd->add_option("--model", flags.model, "Aggregation model")
      ->check(CLI::IsMember(
          {"irn", "prirn", "pl", "dirichlet-counts", "gaussian-scores"}))
      ->capture_default_str();
  cmd->add_option("--reliability", flags.reliabilities,
                  "Comma-separated reliability grid (default: model grid)");
  cmd->add_option("-M,--samples", c.num_samples, "Posterior samples per case")
      ->capture_default_str();
  cmd->add_option("--burn-in", c.burn_in, "Gibbs burn-in sweeps")
      ->capture_default_str();
  cmd->add_option("--thin", c.thin, "Gibbs thinning stride")
      ->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "Gamma prior shape")
      ->capture_default_str();
  cmd->add_option("--beta", c.beta, "Gamma prior rate")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  cmd->add_option("--k", flags.k_grid, "Comma-separated k grid")
      ->capture_default_str();
  cmd->add_option("--overlap-depth", c.overlap_depth,
                  "Depth L for average overlap")
      ->capture_default_str();
  cmd->add_option("--bins", c.histogram_bins, "Histogram bins")
      ->capture_default_str();
  cmd->add_option("--threshold", c.score_threshold,
                  "Outcome threshold for gaussian-scores")
      ->capture_default_str();
  cmd->add_option("--count-prior", c.count_prior,
                  "Pseudo-count for dirichlet-counts")
      ->capture_default_str();
  cmd->add_option("--workers", c.workers, "Worker threads")
      ->capture_default_str();
  cmd->add_option("-o,--output-dir", c.output_dir,
                  std::string("Output directory (default: $") + kOutputDirEnv +
                      " or ./uaeval_out)");
}

int RunStage(RunFlags& flags, uaeval::RunStage stage) {
  auto config = flags.config;
  const auto defaults = uaeval::RunConfig::ForModel(flags.model);
  config.model = flags.model;
  config.stage = stage;
  config.reliabilities =
      flags.reliabilities
          ? ParseList<double>(*flags.reliabilities, "--reliability")
          : defaults.reliabilities;
  config.k_grid = ParseList<int>(flags.k_grid, "--k");
  if (config.output_dir.empty()) config.output_dir = DefaultOutputDir();
  config.Validate();

  std::optional<uaeval::ClassSpace> classes;
  if (!flags.classes.empty()) classes = uaeval::LoadClassSpace(flags.classes);
  std::optional<fs::path> predictions;
  if (!flags.predictions.empty()) predictions = flags.predictions;
  const auto records =
      uaeval::Ingest(flags.cases, flags.annotations, predictions,
                     classes ? &*classes : nullptr);
  const auto result =
      uaeval::Run(config, records, classes ? &*classes : nullptr);
  for (const auto& path : result.reports) std::cout << path.string() << '\n';
  std::cout << result.summary.string() << '\n'
            << result.manifest.string() << '\n';
  for (const auto& f : result.failures) {
    std::cerr << "case " << f.case_id << " (reliability " << f.reliability
              << "): " << f.error << '\n';
  }
  return result.failures.empty() ? kExitOk : kExitData;
}

struct SimulateFlags {
  int num_classes = 5;
  std::string lambda;
  int annotators = 3;
  std::string blocks = "1,2";
  double noise = 0.0;
  int cases = 10;
  uint64_t seed = 0;
  fs::path output_dir;
};

int Simulate(const SimulateFlags& flags) {
  const fs::path dir =
      flags.output_dir.empty() ? DefaultOutputDir() : flags.output_dir;
  if (flags.cases < 1) {
    throw uaeval::Error(uaeval::ErrorCode::kConfigError, "--cases must be >= 1");
  }
  std::optional<std::vector<double>> fixed;
  if (!flags.lambda.empty()) fixed = ParseList<double>(flags.lambda, "--lambda");
  const auto block_sizes =
      uaeval::ParseBlockPolicy(flags.blocks, flags.num_classes);

  std::vector<uaeval::CaseRecord> records;
  fs::create_directories(dir);
  std::ofstream truth(dir / "truth.jsonl");
  for (int i = 0; i < flags.cases; ++i) {
    const std::string case_id = "sim" + std::to_string(i);
    const uint64_t seed = uaeval::DeriveSeed(flags.seed, case_id);
    uaeval::SimSpec spec;
    spec.num_classes = flags.num_classes;
    if (fixed) {
      spec.lambda = *fixed;
    } else {
      uaeval::Rng rng(uaeval::DeriveSeed(seed, "lambda"));
      spec.lambda = uaeval::SampleDirichlet(
          std::vector<double>(flags.num_classes, 1.0), rng);
    }
    spec.num_annotators = flags.annotators;
    spec.block_sizes = block_sizes;
    spec.noise = flags.noise;
    spec.seed = seed;

    uaeval::CaseRecord record;
    record.case_id = case_id;
    record.num_classes = flags.num_classes;
    record.annotations = uaeval::SimulateAnnotations(spec);
    for (int a = 0; a < flags.annotators; ++a) {
      record.annotator_ids.push_back("a" + std::to_string(a));
    }
    record.scores.assign(flags.annotators, std::nullopt);
    truth << nlohmann::json{{"case_id", case_id}, {"lambda", spec.lambda}}.dump()
          << '\n';
    records.push_back(std::move(record));
  }
  uaeval::WriteCaseFiles(dir, records);
  std::cout << (dir / "cases.jsonl").string() << '\n'
            << (dir / "annotations.jsonl").string() << '\n'
            << (dir / "truth.jsonl").string() << '\n';
  return kExitOk;
}

int Selfcheck(uint64_t seed, const std::string& fault) {
  uaeval::SelfcheckOptions options;
  options.seed = seed;
  if (fault == "normalization") {
    options.corrupt_normalization = true;
  } else if (!fault.empty()) {
    throw uaeval::Error(uaeval::ErrorCode::kConfigError,
                        "unknown fault '" + fault + "'");
  }
  bool ok = true;
  for (const auto& suite : uaeval::RunSelfcheck(options)) {
    std::cout << (suite.passed ? "PASS " : "FAIL ") << suite.name << ": "
              << suite.detail << '\n';
    ok = ok && suite.passed;
  }
  return ok ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aggregate ranked annotations and score predictions against "
               "the resulting plausibility posterior."};
  app.require_subcommand(1);

  RunFlags aggregate_flags, certainty_flags, evaluate_flags;
  auto* aggregate = app.add_subcommand(
      "aggregate", "Per-class posterior mean and SD of plausibilities");
  AddRunFlags(aggregate, aggregate_flags, false);
  auto* certainty = app.add_subcommand(
      "certainty", "Annotation and risk certainty per case");
  AddRunFlags(certainty, certainty_flags, false);
  auto* evaluate = app.add_subcommand(
      "evaluate", "Certainty plus uncertainty-adjusted metrics");
  AddRunFlags(evaluate, evaluate_flags, true);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Write synthetic cases drawn from known plausibilities");
  simulate->add_option("-K,--num-classes", sim.num_classes, "Classes")
      ->capture_default_str();
  simulate->add_option("--lambda", sim.lambda,
                       "Comma-separated true plausibilities (default: "
                       "Dirichlet(1) per case)");
  simulate->add_option("--annotators", sim.annotators, "Annotators per case")
      ->capture_default_str();
  simulate->add_option("--blocks", sim.blocks,
                       "Ranked block sizes, e.g. 1,2 or full")
      ->capture_default_str();
  simulate->add_option("--noise", sim.noise,
                       "Probability an annotator ranks uniformly at random")
      ->capture_default_str();
  simulate->add_option("--cases", sim.cases, "Number of cases")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
  simulate->add_option("-o,--output-dir", sim.output_dir, "Output directory");

  uint64_t selfcheck_seed = uaeval::SelfcheckOptions{}.seed;
  std::string fault;
  auto* selfcheck = app.add_subcommand(
      "selfcheck", "Run the oracle-equivalence suites");
  selfcheck->add_option("--seed", selfcheck_seed, "Seed")->capture_default_str();
  selfcheck->add_option("--inject-fault", fault,
                        "Corrupt a component on purpose (normalization)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*aggregate) return RunStage(aggregate_flags, uaeval::RunStage::kAggregate);
    if (*certainty) return RunStage(certainty_flags, uaeval::RunStage::kCertainty);
    if (*evaluate) return RunStage(evaluate_flags, uaeval::RunStage::kEvaluate);
    if (*simulate) return Simulate(sim);
    if (*selfcheck) return Selfcheck(selfcheck_seed, fault);
  } catch (const uaeval::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == uaeval::ErrorCode::kConfigError ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}
