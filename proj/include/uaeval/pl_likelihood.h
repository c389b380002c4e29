#ifndef UAEVAL_PL_LIKELIHOOD_H_
#define UAEVAL_PL_LIKELIHOOD_H_

#include <cstdint>
#include <span>
#include <vector>

#include "uaeval/rankings.h"

namespace uaeval {

// Largest tied block the subset recursion accepts (2^20 table entries).
inline constexpr int kDefaultBlockCap = 20;

inline constexpr int kDefaultPlRepetitions[] = {1, 2, 3, 5, 10};

// Throws NonPositiveWeight unless every weight is finite and > 0.
void CheckPositiveWeights(std::span<const double> lambda);

// Plackett-Luce log-probability of a complete ordering sigma of [K):
// sum_k log lambda_{sigma_k} - log(sum_{j >= k} lambda_{sigma_j}).
double PlFullRankingLogProb(std::span<const double> lambda,
                            std::span<const ClassId> sigma);

// R(A) for every subset A of one block, from
//   R(empty) = 1,
//   R(A) = sum_{a in A} R(A \ {a}) / (residual + sum_{a in A} lambda_a),
// where `residual` is the mass of every class ranked below the block.
// Subsets are bitmasks over block-local indices: bit i is block()[i].
//
// Values are filled one Hasse layer (subset size) at a time and each layer
// keeps its own log scale, so blocks of tiny weights do not overflow.
class SubsetTable {
 public:
  // Throws BlockTooLarge for blocks above `cap` and InvalidArgument for an
  // empty block or negative residual.
  SubsetTable(std::span<const ClassId> block, double residual_mass,
              std::span<const double> lambda, int cap = kDefaultBlockCap);

  int block_size() const { return static_cast<int>(block_.size()); }
  const std::vector<ClassId>& block() const { return block_; }
  double residual_mass() const { return residual_mass_; }
  uint32_t full_mask() const { return (uint32_t{1} << block_.size()) - 1; }

  double LogValue(uint32_t mask) const;
  // exp(LogValue); may overflow for extreme inputs.
  double Value(uint32_t mask) const;
  // R(A) up to a factor shared by all subsets of the same size. Ratios of
  // same-size subsets are exact.
  double LayerScaledValue(uint32_t mask) const { return scaled_[mask]; }

 private:
  std::vector<ClassId> block_;
  double residual_mass_;
  std::vector<double> scaled_;
  std::vector<double> layer_log_scale_;
};

// Exact log p(b | lambda) through the subset recursion on b_1..b_{L-1}; the
// final block contributes probability one and is never expanded.
double PlPartialRankingLogProb(std::span<const double> lambda,
                               const PartialRanking& ranking,
                               int block_cap = kDefaultBlockCap);

// repetitions * sum_r log p(b^r | lambda).
double PlLogLikelihoodMulti(std::span<const double> lambda,
                            std::span<const PartialRanking> rankings,
                            int repetitions = 1,
                            int block_cap = kDefaultBlockCap);

}  // namespace uaeval

#endif  // UAEVAL_PL_LIKELIHOOD_H_
