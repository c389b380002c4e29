#include "uaeval/prirn.h"

#include "uaeval/errors.h"
#include "uaeval/random.h"

namespace uaeval {

PrIrnModel::PrIrnModel(std::span<const PartialRanking> rankings, double gamma)
    : gamma_(gamma), irn_(IrnAggregate(rankings)) {
  if (!(gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "PrIRN gamma must be positive");
  }
  for (size_t c = 0; c < irn_.normalized.size(); ++c) {
    if (irn_.normalized[c] > 0.0) support_.push_back(static_cast<ClassId>(c));
  }
}

PosteriorSamples PrIrnModel::Sample(int num_samples, uint64_t seed) const {
  if (num_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one sample");
  }
  const int k = static_cast<int>(irn_.normalized.size());
  std::vector<double> concentration(k);
  for (int c = 0; c < k; ++c) concentration[c] = gamma_ * irn_.normalized[c];
  PosteriorSamples out(k, {"prirn", gamma_, seed});
  Rng rng(seed);
  for (int m = 0; m < num_samples; ++m) {
    out.Append(SampleDirichlet(concentration, rng));
  }
  return out;
}

PosteriorSamples PrIrnSample(std::span<const PartialRanking> rankings,
                             double gamma, int num_samples, uint64_t seed) {
  return PrIrnModel(rankings, gamma).Sample(num_samples, seed);
}

}  // namespace uaeval
