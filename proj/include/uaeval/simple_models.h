#ifndef UAEVAL_SIMPLE_MODELS_H_
#define UAEVAL_SIMPLE_MODELS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "uaeval/posterior.h"

namespace uaeval {

// Categorical votes: s_c annotators picked class c.
struct LabelCounts {
  std::vector<int> counts;
  double gamma = 1.0;
  double alpha_prior = 0.01;

  void Validate() const;
};

// Dirichlet(gamma * s + alpha_prior * 1). With alpha_prior = 0, classes that
// received no vote stay at exactly zero.
PosteriorSamples DirichletFromCounts(const LabelCounts& counts,
                                     int num_samples, uint64_t seed);

// Conjugate normal-inverse-gamma prior on score mean and variance:
//   sigma^2 ~ InvGamma(shape, scale),  mu | sigma^2 ~ N(mean, sigma^2 / nu).
struct NormalInverseGamma {
  double mean = 0.0;
  double nu = 1.0;
  double shape = 2.0;
  double scale = 1.0;

  void Validate() const;
  // Posterior after observing `scores`.
  NormalInverseGamma Update(std::span<const double> scores) const;
};

// Prior matched to the scores themselves: centred on their mean, one prior
// pseudo-observation, and an inverse-gamma with shape 2 whose mean equals the
// sample variance (1 when fewer than two distinct scores).
NormalInverseGamma MomentMatchedPrior(std::span<const double> scores);

struct ScoreModel {
  NormalInverseGamma prior;
  double threshold = 0.0;
};

enum class ThresholdAveraging {
  // Fraction of posterior draws in which the winning side is the modal one;
  // the same construction as top-1 annotation certainty.
  kWinnerFrequency,
  // max(E[P(y <= t)], E[P(y > t)]) over posterior draws.
  kMeanProbability,
};

struct ThresholdCertainty {
  double certainty = 0.0;
  // Posterior mean of P(y <= t).
  double mean_prob_below = 0.0;
  // Fraction of draws in which y <= t is the more probable side.
  double below_wins = 0.0;
};

ThresholdCertainty ScoreThresholdCertainty(
    std::span<const double> scores, const ScoreModel& model, int num_samples,
    uint64_t seed,
    ThresholdAveraging averaging = ThresholdAveraging::kWinnerFrequency);

}  // namespace uaeval

#endif  // UAEVAL_SIMPLE_MODELS_H_
