#include "uaeval/pl_gibbs.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "uaeval/errors.h"

namespace uaeval {

void GibbsConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfigError, what);
  };
  if (!(alpha > 0.0) || !(beta > 0.0)) fail("alpha and beta must be positive");
  if (iterations < 1) fail("iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) fail("need 0 <= burn_in < iterations");
  if (thin < 1) fail("thinning stride must be >= 1");
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (block_cap < 1) fail("block cap must be >= 1");
  if (NumRetained() < 1) fail("no samples retained after burn-in and thinning");
}

std::vector<double> SampleArrivalTimes(std::span<const double> lambda,
                                       std::span<const ClassId> sigma,
                                       int observed, Rng& rng) {
  const int k = static_cast<int>(sigma.size());
  if (static_cast<int>(lambda.size()) != k || observed < 0 || observed > k) {
    throw Error(ErrorCode::kInvalidArgument, "bad arrival-time request");
  }
  // Rate of interarrival i is the mass still in the race at position i.
  std::vector<double> remaining(k + 1, 0.0);
  for (int i = k; i-- > 0;) remaining[i] = remaining[i + 1] + lambda[sigma[i]];
  std::vector<double> tau(k, 0.0);
  double clock = 0.0;
  for (int i = 0; i < observed; ++i) {
    clock += ExponentialVariate(remaining[i], rng);
    tau[sigma[i]] = clock;
  }
  for (int i = observed; i < k; ++i) tau[sigma[i]] = clock;
  return tau;
}

std::vector<ClassId> SampleCompatibleOrder(std::span<const double> lambda,
                                           const PartialRanking& ranking,
                                           Rng& rng, int block_cap) {
  const auto blocks = ranking.Blocks();
  const auto leading = ranking.LeadingBlocks();
  std::vector<double> below(blocks.size(), 0.0);
  for (size_t l = blocks.size() - 1; l-- > 0;) {
    below[l] = below[l + 1];
    for (ClassId c : blocks[l + 1]) below[l] += lambda[c];
  }

  std::vector<ClassId> sigma;
  sigma.reserve(ranking.num_classes());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> weights;
  for (size_t l = 0; l < leading.size(); ++l) {
    const auto& block = leading[l];
    if (block.size() == 1) {
      sigma.push_back(block.front());
      continue;
    }
    SubsetTable table(block, below[l], lambda, block_cap);
    uint32_t remaining = table.full_mask();
    while (remaining != 0) {
      // Choose the next class s with probability proportional to
      // R(remaining \ {s}); all candidates share one Hasse layer.
      weights.clear();
      double total = 0.0;
      for (uint32_t bits = remaining; bits != 0; bits &= bits - 1) {
        const uint32_t bit = bits & (~bits + 1);
        const double w = table.LayerScaledValue(remaining & ~bit);
        weights.push_back(w);
        total += w;
      }
      double u = uniform(rng) * total;
      size_t pick = 0;
      while (pick + 1 < weights.size() && u >= weights[pick]) {
        u -= weights[pick];
        ++pick;
      }
      uint32_t bits = remaining;
      for (size_t i = 0; i < pick; ++i) bits &= bits - 1;
      const uint32_t bit = bits & (~bits + 1);
      sigma.push_back(block[std::countr_zero(bit)]);
      remaining &= ~bit;
    }
  }
  for (ClassId c : blocks.back()) sigma.push_back(c);
  return sigma;
}

std::vector<double> SampleLambdaGivenTau(
    std::span<const int> counts, std::span<const std::vector<double>> tau,
    double alpha, double beta, Rng& rng) {
  std::vector<double> lambda(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) {
    double rate = beta;
    for (const auto& t : tau) rate += t[k];
    // A zero weight would make later likelihood terms undefined; clamp
    // underflowed draws (only reachable with alpha << 1) to the smallest
    // normal double.
    lambda[k] = std::max(GammaVariate(alpha + counts[k], rate, rng),
                         std::numeric_limits<double>::min());
  }
  return lambda;
}

PlGibbsSampler::PlGibbsSampler(std::span<const PartialRanking> rankings,
                               GibbsConfig config)
    : num_classes_(0), config_(config), rng_(config.seed) {
  config_.Validate();
  if (rankings.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sampler needs the class count; use GibbsRun for zero "
                "annotations");
  }
  num_classes_ = rankings.front().num_classes();
  for (int rep = 0; rep < config_.repetitions; ++rep) {
    for (const auto& r : rankings) {
      if (r.num_classes() != num_classes_) {
        throw Error(ErrorCode::kInvalidArgument,
                    "rankings disagree on the number of classes");
      }
      annotations_.push_back(r);
    }
  }
  counts_.assign(num_classes_, 0);
  for (const auto& a : annotations_) {
    const auto leading = a.LeadingClasses();
    observed_.push_back(static_cast<int>(leading.size()));
    for (ClassId c : leading) ++counts_[c];
  }
  state_.lambda.resize(num_classes_);
  for (double& v : state_.lambda) {
    v = std::max(GammaVariate(config_.alpha, config_.beta, rng_),
                 std::numeric_limits<double>::min());
  }
  for (const auto& a : annotations_) {
    std::vector<ClassId> sigma;
    for (const auto& block : a.Blocks()) {
      sigma.insert(sigma.end(), block.begin(), block.end());
    }
    state_.sigma.push_back(std::move(sigma));
    state_.tau.emplace_back(num_classes_, 0.0);
  }
}

void PlGibbsSampler::SampleSigma() {
  for (size_t r = 0; r < annotations_.size(); ++r) {
    state_.sigma[r] = SampleCompatibleOrder(state_.lambda, annotations_[r],
                                            rng_, config_.block_cap);
  }
}

void PlGibbsSampler::SampleTau() {
  for (size_t r = 0; r < annotations_.size(); ++r) {
    state_.tau[r] =
        SampleArrivalTimes(state_.lambda, state_.sigma[r], observed_[r], rng_);
  }
}

void PlGibbsSampler::SampleLambda() {
  state_.lambda = SampleLambdaGivenTau(counts_, state_.tau, config_.alpha,
                                       config_.beta, rng_);
}

void PlGibbsSampler::Sweep() {
  SampleSigma();
  SampleTau();
  SampleLambda();
}

PosteriorSamples PlGibbsSampler::Run() {
  PosteriorSamples out(num_classes_,
                       {"pl", static_cast<double>(config_.repetitions),
                        config_.seed});
  std::vector<double> normalized(num_classes_);
  for (int t = 1; t <= config_.iterations; ++t) {
    Sweep();
    if (t <= config_.burn_in || (t - config_.burn_in) % config_.thin != 0) {
      continue;
    }
    double total = 0.0;
    for (double v : state_.lambda) total += v;
    for (int k = 0; k < num_classes_; ++k) {
      normalized[k] = state_.lambda[k] / total;
    }
    out.Append(normalized);
  }
  return out;
}

PosteriorSamples GibbsRun(std::span<const PartialRanking> rankings,
                          int num_classes, const GibbsConfig& config) {
  if (!rankings.empty()) {
    if (rankings.front().num_classes() != num_classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rankings disagree with the requested class count");
    }
    return PlGibbsSampler(rankings, config).Run();
  }
  // No annotations: every conditional collapses to the prior.
  config.Validate();
  PosteriorSamples out(num_classes,
                       {"pl", static_cast<double>(config.repetitions),
                        config.seed});
  Rng rng(config.seed);
  std::vector<double> lambda(num_classes);
  for (int t = 1; t <= config.iterations; ++t) {
    double total = 0.0;
    for (double& v : lambda) {
      v = std::max(GammaVariate(config.alpha, config.beta, rng),
                   std::numeric_limits<double>::min());
      total += v;
    }
    if (t <= config.burn_in || (t - config.burn_in) % config.thin != 0) {
      continue;
    }
    for (double& v : lambda) v /= total;
    out.Append(lambda);
  }
  return out;
}

}  // namespace uaeval
