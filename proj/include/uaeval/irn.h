#ifndef UAEVAL_IRN_H_
#define UAEVAL_IRN_H_

#include <span>
#include <vector>

#include "uaeval/rankings.h"

namespace uaeval {

// Inverse rank normalization: block i (1-based, final block excluded) spreads
// weight 1/i evenly over its members.
struct IrnScores {
  std::vector<double> unnormalized;
  std::vector<double> normalized;
};

std::vector<double> IrnSingle(const PartialRanking& ranking);

// Sums per-annotator scores, then normalizes once. Throws AllZeroMass when no
// annotator ranked anything, and InvalidArgument for an empty list or
// mismatched class counts.
IrnScores IrnAggregate(std::span<const PartialRanking> rankings);

// Argmax with ties going to the lowest class id.
ClassId Top1Label(std::span<const double> scores);

}  // namespace uaeval

#endif  // UAEVAL_IRN_H_
