#ifndef UAEVAL_PL_GIBBS_H_
#define UAEVAL_PL_GIBBS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "uaeval/pl_likelihood.h"
#include "uaeval/posterior.h"
#include "uaeval/random.h"
#include "uaeval/rankings.h"

namespace uaeval {

struct GibbsConfig {
  // Gamma(shape alpha, rate beta) prior on every unnormalized weight.
  double alpha = 1.0;
  double beta = 1.0;
  int iterations = 2000;
  int burn_in = 500;
  int thin = 1;
  // Reliability: every annotation enters the likelihood this many times.
  int repetitions = 1;
  uint64_t seed = 0;
  int block_cap = kDefaultBlockCap;

  // Throws ConfigError on out-of-range fields.
  void Validate() const;
  // Sweeps kept after burn-in and thinning.
  int NumRetained() const { return (iterations - burn_in) / thin; }
};

// Latent state of the augmented chain. One sigma/tau pair per effective
// annotation (annotator x repetition).
struct GibbsState {
  std::vector<double> lambda;
  std::vector<std::vector<ClassId>> sigma;
  std::vector<std::vector<double>> tau;
};

// Exponential race given an ordering: the first `observed` positions of sigma
// receive arrival times with interarrival k ~ Exp(sum_{j >= k} lambda_sigma_j);
// every later class is censored at the last observed arrival (0 when
// `observed` is 0). observed = K gives the complete race.
std::vector<double> SampleArrivalTimes(std::span<const double> lambda,
                                       std::span<const ClassId> sigma,
                                       int observed, Rng& rng);

// Draws an ordering compatible with `ranking` from p(sigma | lambda, b) by
// walking each leading block's subset table from the full set down to the
// empty set. The final block is left in ascending class order; its internal
// order is never observed.
std::vector<ClassId> SampleCompatibleOrder(std::span<const double> lambda,
                                           const PartialRanking& ranking,
                                           Rng& rng,
                                           int block_cap = kDefaultBlockCap);

// lambda_k ~ Gamma(alpha + counts_k, beta + sum_r tau^r_k).
std::vector<double> SampleLambdaGivenTau(
    std::span<const int> counts, std::span<const std::vector<double>> tau,
    double alpha, double beta, Rng& rng);

// Gibbs sampler for the Plackett-Luce posterior p(lambda | b^1..b^R) with
// latent orderings and arrival times. Single owner; not thread-safe.
class PlGibbsSampler {
 public:
  PlGibbsSampler(std::span<const PartialRanking> rankings, GibbsConfig config);

  // One sweep: sigma | lambda, b; then tau | lambda, sigma; then
  // lambda | tau.
  void Sweep();
  void SampleSigma();
  void SampleTau();
  void SampleLambda();

  const GibbsState& state() const { return state_; }
  GibbsState& mutable_state() { return state_; }
  // Appearances of each class in leading blocks across effective annotations.
  const std::vector<int>& counts() const { return counts_; }
  const GibbsConfig& config() const { return config_; }

  // Runs the configured number of sweeps and emits the retained lambdas,
  // each normalized to the simplex.
  PosteriorSamples Run();

 private:
  int num_classes_;
  std::vector<PartialRanking> annotations_;
  GibbsConfig config_;
  Rng rng_;
  GibbsState state_;
  std::vector<int> counts_;
  std::vector<int> observed_;
};

PosteriorSamples GibbsRun(std::span<const PartialRanking> rankings,
                          int num_classes, const GibbsConfig& config);

}  // namespace uaeval

#endif  // UAEVAL_PL_GIBBS_H_
