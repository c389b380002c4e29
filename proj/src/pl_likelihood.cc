#include "uaeval/pl_likelihood.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "uaeval/errors.h"

namespace uaeval {
namespace {

constexpr double kRescaleAbove = 1e150;
constexpr double kRescaleBelow = 1e-150;

double Total(std::span<const double> lambda) {
  double total = 0.0;
  for (double v : lambda) total += v;
  return total;
}

}  // namespace

void CheckPositiveWeights(std::span<const double> lambda) {
  for (size_t k = 0; k < lambda.size(); ++k) {
    if (!(lambda[k] > 0.0) || !std::isfinite(lambda[k])) {
      throw Error(ErrorCode::kNonPositiveWeight,
                  "weight of class " + std::to_string(k) +
                      " must be finite and positive");
    }
  }
}

double PlFullRankingLogProb(std::span<const double> lambda,
                            std::span<const ClassId> sigma) {
  CheckPositiveWeights(lambda);
  const size_t k = lambda.size();
  if (sigma.size() != k) {
    throw Error(ErrorCode::kInvalidArgument,
                "ordering length does not match the number of classes");
  }
  std::vector<bool> seen(k, false);
  for (ClassId c : sigma) {
    if (c < 0 || static_cast<size_t>(c) >= k || seen[c]) {
      throw Error(ErrorCode::kInvalidArgument, "not a permutation of [K)");
    }
    seen[c] = true;
  }
  // Remaining mass accumulated from the back; no cancellation.
  double log_prob = 0.0;
  double remaining = 0.0;
  for (size_t i = k; i-- > 0;) {
    remaining += lambda[sigma[i]];
    log_prob += std::log(lambda[sigma[i]]) - std::log(remaining);
  }
  return log_prob;
}

SubsetTable::SubsetTable(std::span<const ClassId> block, double residual_mass,
                         std::span<const double> lambda, int cap)
    : block_(block.begin(), block.end()), residual_mass_(residual_mass) {
  if (block_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "subset table of an empty block");
  }
  if (static_cast<int>(block_.size()) > cap || block_.size() > 30) {
    throw Error(ErrorCode::kBlockTooLarge,
                "block of size " + std::to_string(block_.size()) +
                    " exceeds cap " + std::to_string(cap));
  }
  if (!(residual_mass >= 0.0) || !std::isfinite(residual_mass)) {
    throw Error(ErrorCode::kInvalidArgument,
                "residual mass must be finite and non-negative");
  }
  const int n = static_cast<int>(block_.size());
  std::vector<double> weight(n);
  double total = residual_mass;
  for (int i = 0; i < n; ++i) {
    const ClassId c = block_[i];
    if (c < 0 || static_cast<size_t>(c) >= lambda.size()) {
      throw Error(ErrorCode::kClassIdOutOfRange, "block member out of range");
    }
    if (!(lambda[c] > 0.0) || !std::isfinite(lambda[c])) {
      throw Error(ErrorCode::kNonPositiveWeight,
                  "weight of class " + std::to_string(c) +
                      " must be finite and positive");
    }
    weight[i] = lambda[c];
    total += weight[i];
  }
  // Work with weights divided by the block's total so denominators are <= 1.
  const double residual = residual_mass / total;
  for (double& w : weight) w /= total;
  const double log_total = std::log(total);

  const uint32_t size = uint32_t{1} << n;
  scaled_.assign(size, 0.0);
  std::vector<double> subset_mass(size, 0.0);
  for (uint32_t mask = 1; mask < size; ++mask) {
    const int low = std::countr_zero(mask);
    subset_mass[mask] = subset_mass[mask & (mask - 1)] + weight[low];
  }
  layer_log_scale_.assign(n + 1, 0.0);
  scaled_[0] = 1.0;
  for (int layer = 1; layer <= n; ++layer) {
    layer_log_scale_[layer] = layer_log_scale_[layer - 1] - log_total;
    double layer_max = 0.0;
    // Gosper's hack: every mask with `layer` bits set, in increasing order.
    uint32_t mask = (uint32_t{1} << layer) - 1;
    while (mask < size) {
      double sum = 0.0;
      for (uint32_t rest = mask; rest != 0; rest &= rest - 1) {
        sum += scaled_[mask & ~(rest & (~rest + 1))];
      }
      scaled_[mask] = sum / (residual + subset_mass[mask]);
      layer_max = std::max(layer_max, scaled_[mask]);
      const uint32_t c = mask & (~mask + 1);
      const uint32_t r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
    if (layer_max > kRescaleAbove || layer_max < kRescaleBelow) {
      mask = (uint32_t{1} << layer) - 1;
      while (mask < size) {
        scaled_[mask] /= layer_max;
        const uint32_t c = mask & (~mask + 1);
        const uint32_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
      }
      layer_log_scale_[layer] += std::log(layer_max);
    }
  }
}

double SubsetTable::LogValue(uint32_t mask) const {
  return std::log(scaled_.at(mask)) + layer_log_scale_[std::popcount(mask)];
}

double SubsetTable::Value(uint32_t mask) const {
  return std::exp(LogValue(mask));
}

double PlPartialRankingLogProb(std::span<const double> lambda,
                               const PartialRanking& ranking, int block_cap) {
  CheckPositiveWeights(lambda);
  if (static_cast<int>(lambda.size()) != ranking.num_classes()) {
    throw Error(ErrorCode::kInvalidArgument,
                "weights do not match the ranking's class count");
  }
  const double total = Total(lambda);
  const auto blocks = ranking.Blocks();
  const auto leading = ranking.LeadingBlocks();
  std::vector<double> normalized(lambda.size());
  for (size_t k = 0; k < lambda.size(); ++k) normalized[k] = lambda[k] / total;

  // Mass ranked strictly below block l, accumulated from the final block up.
  double below = 0.0;
  for (ClassId c : blocks.back()) below += normalized[c];
  double log_prob = 0.0;
  for (size_t l = leading.size(); l-- > 0;) {
    SubsetTable table(leading[l], below, normalized, block_cap);
    log_prob += table.LogValue(table.full_mask());
    for (ClassId c : leading[l]) {
      log_prob += std::log(normalized[c]);
      below += normalized[c];
    }
  }
  return log_prob;
}

double PlLogLikelihoodMulti(std::span<const double> lambda,
                            std::span<const PartialRanking> rankings,
                            int repetitions, int block_cap) {
  if (repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  double sum = 0.0;
  for (const auto& ranking : rankings) {
    sum += PlPartialRankingLogProb(lambda, ranking, block_cap);
  }
  return repetitions * sum;
}

}  // namespace uaeval
