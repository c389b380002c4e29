#include "uaeval/simple_models.h"

#include <algorithm>
#include <cmath>

#include "uaeval/errors.h"
#include "uaeval/random.h"

namespace uaeval {

void LabelCounts::Validate() const {
  if (counts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "counts need at least one class");
  }
  long total = 0;
  for (int c : counts) {
    if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative vote count");
    total += c;
  }
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  }
  if (!(alpha_prior >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_prior must be >= 0");
  }
  if (total == 0 && alpha_prior == 0.0) {
    throw Error(ErrorCode::kAllZeroMass, "no votes and no prior mass");
  }
}

PosteriorSamples DirichletFromCounts(const LabelCounts& counts,
                                     int num_samples, uint64_t seed) {
  counts.Validate();
  if (num_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one sample");
  }
  std::vector<double> concentration(counts.counts.size());
  for (size_t c = 0; c < concentration.size(); ++c) {
    concentration[c] = counts.gamma * counts.counts[c] + counts.alpha_prior;
  }
  PosteriorSamples out(static_cast<int>(concentration.size()),
                       {"dirichlet-counts", counts.gamma, seed});
  Rng rng(seed);
  for (int m = 0; m < num_samples; ++m) {
    out.Append(SampleDirichlet(concentration, rng));
  }
  return out;
}

void NormalInverseGamma::Validate() const {
  if (!(nu > 0.0) || !(shape > 0.0) || !(scale > 0.0) ||
      !std::isfinite(mean)) {
    throw Error(ErrorCode::kInvalidArgument,
                "normal-inverse-gamma needs nu, shape, scale > 0");
  }
}

NormalInverseGamma NormalInverseGamma::Update(
    std::span<const double> scores) const {
  Validate();
  const double n = static_cast<double>(scores.size());
  if (scores.empty()) return *this;
  double mean_x = 0.0;
  for (double x : scores) mean_x += x;
  mean_x /= n;
  double ss = 0.0;
  for (double x : scores) ss += (x - mean_x) * (x - mean_x);
  NormalInverseGamma post;
  post.nu = nu + n;
  post.mean = (nu * mean + n * mean_x) / post.nu;
  post.shape = shape + 0.5 * n;
  post.scale = scale + 0.5 * ss +
               0.5 * nu * n * (mean_x - mean) * (mean_x - mean) / post.nu;
  return post;
}

NormalInverseGamma MomentMatchedPrior(std::span<const double> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one score");
  }
  const double n = static_cast<double>(scores.size());
  double mean_x = 0.0;
  for (double x : scores) mean_x += x;
  mean_x /= n;
  double var = 0.0;
  if (scores.size() > 1) {
    for (double x : scores) var += (x - mean_x) * (x - mean_x);
    var /= (n - 1.0);
  }
  if (!(var > 0.0)) var = 1.0;
  // InvGamma mean is scale / (shape - 1).
  return {.mean = mean_x, .nu = 1.0, .shape = 2.0, .scale = var};
}

ThresholdCertainty ScoreThresholdCertainty(std::span<const double> scores,
                                           const ScoreModel& model,
                                           int num_samples, uint64_t seed,
                                           ThresholdAveraging averaging) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one score");
  }
  if (num_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one sample");
  }
  const NormalInverseGamma post = model.prior.Update(scores);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum_prob = 0.0;
  int below_wins = 0;
  for (int m = 0; m < num_samples; ++m) {
    const double variance = 1.0 / GammaVariate(post.shape, post.scale, rng);
    const double mu = post.mean + std::sqrt(variance / post.nu) * normal(rng);
    const double z = (model.threshold - mu) / std::sqrt(variance);
    const double prob_below = 0.5 * std::erfc(-z / std::sqrt(2.0));
    sum_prob += prob_below;
    if (prob_below >= 0.5) ++below_wins;
  }
  ThresholdCertainty out;
  out.mean_prob_below = sum_prob / num_samples;
  out.below_wins = static_cast<double>(below_wins) / num_samples;
  out.certainty = averaging == ThresholdAveraging::kWinnerFrequency
                      ? std::max(out.below_wins, 1.0 - out.below_wins)
                      : std::max(out.mean_prob_below, 1.0 - out.mean_prob_below);
  return out;
}

}  // namespace uaeval
