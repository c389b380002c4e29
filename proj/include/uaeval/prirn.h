#ifndef UAEVAL_PRIRN_H_
#define UAEVAL_PRIRN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "uaeval/irn.h"
#include "uaeval/posterior.h"
#include "uaeval/rankings.h"

namespace uaeval {

inline constexpr double kDefaultPrIrnGammas[] = {10, 20, 30, 50, 100};

// Probabilistic IRN: plausibilities ~ Dirichlet(gamma * IRN) on the classes
// with positive IRN mass; every other class is held at exactly zero.
class PrIrnModel {
 public:
  // Throws AllZeroMass (from IRN) or InvalidArgument for gamma <= 0.
  PrIrnModel(std::span<const PartialRanking> rankings, double gamma);

  double gamma() const { return gamma_; }
  const IrnScores& irn() const { return irn_; }
  const std::vector<ClassId>& support() const { return support_; }

  PosteriorSamples Sample(int num_samples, uint64_t seed) const;

 private:
  double gamma_;
  IrnScores irn_;
  std::vector<ClassId> support_;
};

PosteriorSamples PrIrnSample(std::span<const PartialRanking> rankings,
                             double gamma, int num_samples, uint64_t seed);

}  // namespace uaeval

#endif  // UAEVAL_PRIRN_H_
