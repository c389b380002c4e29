#include "uaeval/selfcheck.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "uaeval/errors.h"
#include "uaeval/irn.h"
#include "uaeval/metrics.h"
#include "uaeval/pl_gibbs.h"
#include "uaeval/pl_likelihood.h"
#include "uaeval/prirn.h"
#include "uaeval/random.h"
#include "uaeval/sim_oracle.h"
#include "uaeval/simple_models.h"

namespace uaeval {
namespace {

std::string Format(const char* fmt, double a, double b = 0.0) {
  char buffer[128];
  std::snprintf(buffer, sizeof(buffer), fmt, a, b);
  return buffer;
}

std::vector<double> RandomWeights(int k, Rng& rng) {
  std::vector<double> w(k);
  for (double& v : w) v = GammaVariate(1.0, 1.0, rng) + 1e-3;
  return w;
}

SuiteResult DpVsEnumeration(uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> k_dist(2, 6);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const int k = k_dist(rng);
    const auto lambda = RandomWeights(k, rng);
    const auto ranking = RandomPartialRanking(k, 3, rng);
    const double dp = std::exp(PlPartialRankingLogProb(lambda, ranking));
    worst = std::max(worst, std::abs(dp - BruteForcePartialProb(lambda, ranking)));
    worst = std::max(worst, std::abs(dp - BruteForceCompleteProb(lambda, ranking)));
  }
  return {"dp_vs_enumeration", worst <= 1e-10,
          Format("max abs error %.3g over 300 instances", worst)};
}

SuiteResult GibbsVsGrid(uint64_t seed) {
  struct Case {
    int k;
    std::vector<std::vector<std::vector<ClassId>>> annotations;
    int resolution;
  };
  const std::vector<Case> cases = {
      {2, {{{0}}}, 2000},
      {3, {{{0}, {1}}, {{2}, {1}}}, 150},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    std::vector<PartialRanking> rankings;
    for (const auto& blocks : c.annotations) {
      rankings.push_back(PartialRanking::Create(c.k, blocks));
    }
    GibbsConfig config;
    config.iterations = 4500;
    config.burn_in = 500;
    config.seed = seed;
    const auto samples = GibbsRun(rankings, c.k, config);
    const auto grid = GridPosteriorOracle(rankings, c.k, config.alpha,
                                          c.resolution);
    const auto mean = samples.Mean();
    for (int i = 0; i < c.k; ++i) {
      worst = std::max(worst, std::abs(mean[i] - grid.mean[i]));
    }
  }
  return {"gibbs_vs_grid", worst <= 0.02,
          Format("max posterior-mean gap %.4f (tolerance 0.02)", worst)};
}

SuiteResult ReductionLaw(uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> k_dist(3, 8);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int k = k_dist(rng);
    auto lambda = RandomWeights(k, rng);
    const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    for (double& v : lambda) v /= total;
    PredictionSet prediction{"c", std::vector<ClassId>(k)};
    std::iota(prediction.ranked.begin(), prediction.ranked.end(), 0);
    std::shuffle(prediction.ranked.begin(), prediction.ranked.end(), rng);
    const auto samples = PosteriorSamples::PointMass(lambda, 5, {"point", 1, 0});
    const ClassId label = Top1Label(lambda);
    for (int depth = 1; depth <= std::min(k, 3); ++depth) {
      const auto top = prediction.TopK(depth);
      const double hard_topk =
          std::find(top.begin(), top.end(), label) != top.end() ? 1.0 : 0.0;
      auto sorted_top = top;
      std::sort(sorted_top.begin(), sorted_top.end());
      const double hard_set = sorted_top == TopKSet(lambda, depth) ? 1.0 : 0.0;
      std::vector<ClassId> order(k);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](ClassId a, ClassId b) { return lambda[a] > lambda[b]; });
      const double hard_ao = AverageOverlap(prediction.ranked, order, depth);
      worst = std::max(worst, std::abs(UaTopKAccuracy(samples, prediction, depth) -
                                       hard_topk));
      worst = std::max(worst, std::abs(UaSetAccuracy(samples, prediction, depth) -
                                       hard_set));
      worst = std::max(
          worst, std::abs(UaAverageOverlap(samples, prediction, depth) - hard_ao));
    }
  }
  return {"reduction_law", worst <= 1e-12,
          Format("max gap to deterministic metrics %.3g", worst)};
}

SuiteResult IrnHandValues() {
  const std::vector<PartialRanking> rankings = {
      PartialRanking::Create(3, {{0}, {1}}),
      PartialRanking::Create(3, {{1}}),
  };
  const auto irn = IrnAggregate(rankings);
  const bool ok = irn.unnormalized == std::vector<double>{1.0, 1.5, 0.0} &&
                  std::abs(irn.normalized[0] - 0.4) <= 1e-15 &&
                  std::abs(irn.normalized[1] - 0.6) <= 1e-15 &&
                  irn.normalized[2] == 0.0 && Top1Label(irn.normalized) == 1;
  return {"irn_hand_values", ok,
          Format("normalized (%.17g, %.17g)", irn.normalized[0],
                 irn.normalized[1])};
}

SuiteResult Normalization(uint64_t seed, bool corrupt) {
  const std::vector<PartialRanking> rankings = {
      PartialRanking::Create(5, {{0}, {1, 2}}),
      PartialRanking::Create(5, {{2}, {0}, {4}}),
  };
  GibbsConfig gibbs;
  gibbs.iterations = 700;
  gibbs.burn_in = 200;
  gibbs.seed = seed;
  std::vector<PosteriorSamples> all;
  all.push_back(PrIrnSample(rankings, 10.0, 500, seed));
  all.push_back(GibbsRun(rankings, 5, gibbs));
  all.push_back(DirichletFromCounts({{3, 0, 1, 0, 0}, 1.0, 0.01}, 500, seed));
  std::string failing;
  for (auto& samples : all) {
    if (corrupt) {
      for (double& v : samples.MutableSample(0)) v *= 1.5;
    }
    if (!samples.IsNormalized(1e-9)) {
      failing += (failing.empty() ? "" : ", ") + samples.provenance().model;
    }
  }
  return {"normalization", failing.empty(),
          failing.empty() ? "prirn, pl and dirichlet-counts samples on simplex"
                          : "off simplex: " + failing};
}

SuiteResult Guard(const std::string& name, const std::function<SuiteResult()>& run) {
  try {
    return run();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw ") + e.what()};
  }
}

}  // namespace

std::vector<SuiteResult> RunSelfcheck(const SelfcheckOptions& options) {
  const uint64_t seed = options.seed;
  return {
      Guard("dp_vs_enumeration",
            [&] { return DpVsEnumeration(DeriveSeed(seed, "dp")); }),
      Guard("gibbs_vs_grid",
            [&] { return GibbsVsGrid(DeriveSeed(seed, "gibbs")); }),
      Guard("reduction_law",
            [&] { return ReductionLaw(DeriveSeed(seed, "reduction")); }),
      Guard("irn_hand_values", [] { return IrnHandValues(); }),
      Guard("normalization",
            [&] {
              return Normalization(DeriveSeed(seed, "normalization"),
                                   options.corrupt_normalization);
            }),
  };
}

}  // namespace uaeval
