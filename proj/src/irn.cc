#include "uaeval/irn.h"

#include "uaeval/errors.h"

namespace uaeval {

std::vector<double> IrnSingle(const PartialRanking& ranking) {
  std::vector<double> scores(ranking.num_classes(), 0.0);
  const auto leading = ranking.LeadingBlocks();
  for (size_t i = 0; i < leading.size(); ++i) {
    const double weight = (1.0 / static_cast<double>(i + 1)) /
                          static_cast<double>(leading[i].size());
    for (ClassId c : leading[i]) scores[c] += weight;
  }
  return scores;
}

IrnScores IrnAggregate(std::span<const PartialRanking> rankings) {
  if (rankings.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "IRN needs at least one ranking");
  }
  const int k = rankings.front().num_classes();
  IrnScores out;
  out.unnormalized.assign(k, 0.0);
  for (const auto& ranking : rankings) {
    if (ranking.num_classes() != k) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rankings disagree on the number of classes");
    }
    const auto single = IrnSingle(ranking);
    for (int c = 0; c < k; ++c) out.unnormalized[c] += single[c];
  }
  double total = 0.0;
  for (double v : out.unnormalized) total += v;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kAllZeroMass, "no annotator ranked any class");
  }
  out.normalized.resize(k);
  for (int c = 0; c < k; ++c) out.normalized[c] = out.unnormalized[c] / total;
  return out;
}

ClassId Top1Label(std::span<const double> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "argmax of an empty vector");
  }
  ClassId best = 0;
  for (size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = static_cast<ClassId>(c);
  }
  return best;
}

}  // namespace uaeval
