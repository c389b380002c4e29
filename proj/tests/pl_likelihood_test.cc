#include "uaeval/pl_likelihood.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "test_util.h"
#include "uaeval/sim_oracle.h"

namespace uaeval {
namespace {

using testing::RandomPositive;
using testing::Ranking;

TEST(FullRankingTest, SequentialChoiceProduct) {
  const std::vector<double> lambda = {0.5, 0.3, 0.2};
  EXPECT_NEAR(PlFullRankingLogProb(lambda, std::vector<ClassId>{0, 1, 2}),
              std::log(0.3), 1e-15);
}

TEST(FullRankingTest, SingleClass) {
  EXPECT_EQ(PlFullRankingLogProb(std::vector<double>{2.0},
                                 std::vector<ClassId>{0}),
            0.0);
}

TEST(FullRankingTest, UniformWeights) {
  const std::vector<double> lambda(5, 0.7);
  EXPECT_NEAR(PlFullRankingLogProb(lambda, std::vector<ClassId>{3, 1, 4, 0, 2}),
              -std::log(120.0), 1e-12);
}

TEST(FullRankingTest, RejectsBadWeights) {
  EXPECT_UAEVAL_ERROR(PlFullRankingLogProb(std::vector<double>{1.0, 0.0},
                                           std::vector<ClassId>{0, 1}),
                      ErrorCode::kNonPositiveWeight);
  EXPECT_UAEVAL_ERROR(PlFullRankingLogProb(std::vector<double>{1.0, -1.0},
                                           std::vector<ClassId>{0, 1}),
                      ErrorCode::kNonPositiveWeight);
}

TEST(SubsetTableTest, SingletonBlock) {
  const std::vector<double> lambda = {0.25, 0.5, 0.25};
  const std::vector<ClassId> block = {0};
  SubsetTable table(block, 0.75, lambda);
  EXPECT_DOUBLE_EQ(table.Value(0), 1.0);
  EXPECT_DOUBLE_EQ(table.Value(1), 1.0 / (0.75 + 0.25));
}

TEST(SubsetTableTest, ThreeUniformClasses) {
  const std::vector<double> lambda(4, 1.0 / 3);
  const std::vector<ClassId> block = {0, 1, 2};
  SubsetTable table(block, 1.0 / 3, lambda);
  // R({a}) = 3/2, R({a,b}) = 3, R({a,b,c}) = 3 * 3 / (4/3).
  EXPECT_NEAR(table.Value(table.full_mask()), 27.0 / 4, 1e-12);
  EXPECT_EQ(table.Value(0), 1.0);
}

TEST(SubsetTableTest, MatchesDirectRecursion) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int size = 1 + trial % 8;
    const auto lambda = RandomPositive(size, rng);
    const double residual = 0.1 * (trial % 4);
    std::vector<ClassId> block(size);
    std::iota(block.begin(), block.end(), 0);
    SubsetTable table(block, residual, lambda);
    std::vector<double> direct(1u << size);
    direct[0] = 1.0;
    for (uint32_t mask = 1; mask < direct.size(); ++mask) {
      double numerator = 0.0, mass = residual;
      for (int i = 0; i < size; ++i) {
        if (mask & (1u << i)) {
          numerator += direct[mask ^ (1u << i)];
          mass += lambda[i];
        }
      }
      direct[mask] = numerator / mass;
    }
    for (uint32_t mask = 0; mask < direct.size(); ++mask) {
      EXPECT_NEAR(table.Value(mask) / direct[mask], 1.0, 1e-12);
    }
  }
}

TEST(SubsetTableTest, TinyWeightsStayFinite) {
  const std::vector<double> lambda(16, 1e-30);
  std::vector<ClassId> block(16);
  std::iota(block.begin(), block.end(), 0);
  SubsetTable table(block, 0.0, lambda);
  const double log_value = table.LogValue(table.full_mask());
  // Zero residual: R(full) = prod 1/(i * lambda) summed over 16! paths
  // collapses to 1 / lambda^16.
  EXPECT_TRUE(std::isfinite(log_value));
  EXPECT_NEAR(log_value, -16 * std::log(1e-30), 1e-9 * std::abs(log_value));
}

TEST(SubsetTableTest, Caps) {
  const std::vector<double> lambda(25, 1.0);
  std::vector<ClassId> block(21);
  std::iota(block.begin(), block.end(), 0);
  EXPECT_UAEVAL_ERROR(SubsetTable(block, 1.0, lambda), ErrorCode::kBlockTooLarge);
  EXPECT_UAEVAL_ERROR(SubsetTable({}, 1.0, lambda), ErrorCode::kInvalidArgument);
}

TEST(PartialRankingProbTest, TwoTermSum) {
  const std::vector<double> lambda(3, 1.0);
  EXPECT_NEAR(std::exp(PlPartialRankingLogProb(lambda, Ranking(3, {{0, 1}}))),
              1.0 / 3, 1e-15);
}

TEST(PartialRankingProbTest, FullRankingMatchesDirect) {
  const std::vector<double> lambda = {0.1, 0.4, 0.2, 0.3};
  const std::vector<ClassId> sigma = {1, 3, 0, 2};
  EXPECT_NEAR(PlPartialRankingLogProb(lambda, Ranking(4, {{1}, {3}, {0}})),
              PlFullRankingLogProb(lambda, sigma), 1e-14);
  EXPECT_NEAR(PlPartialRankingLogProb(lambda, Ranking(4, {{1}, {3}, {0}, {2}})),
              PlFullRankingLogProb(lambda, sigma), 1e-14);
}

TEST(PartialRankingProbTest, SingleBlockIsCertain) {
  const std::vector<double> lambda = {0.1, 0.4, 0.2};
  EXPECT_EQ(PlPartialRankingLogProb(lambda, Ranking(3, {})), 0.0);
  EXPECT_EQ(PlPartialRankingLogProb(lambda, Ranking(3, {{0, 1, 2}})), 0.0);
}

TEST(PartialRankingProbTest, ThreeElementIdentity) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 4 + trial % 3;
    const auto lambda = RandomPositive(k, rng);
    const double z = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    double direct = 0.0;
    std::vector<ClassId> top = {0, 1, 2};
    do {
      double p = 1.0, rest = z;
      for (ClassId c : top) {
        p *= lambda[c] / rest;
        rest -= lambda[c];
      }
      direct += p;
    } while (std::next_permutation(top.begin(), top.end()));
    const double dp =
        std::exp(PlPartialRankingLogProb(lambda, Ranking(k, {{0, 1, 2}})));
    EXPECT_NEAR(dp, direct, 1e-12);
  }
}

TEST(PartialRankingProbTest, AgreesWithEnumeration) {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + trial % 6;
    const auto lambda = RandomPositive(k, rng);
    const auto r = RandomPartialRanking(k, 3, rng);
    double brute = 0.0;
    ForEachCompatiblePermutation(r, [&](std::span<const ClassId> sigma) {
      brute += std::exp(PlFullRankingLogProb(lambda, sigma));
    });
    EXPECT_NEAR(std::exp(PlPartialRankingLogProb(lambda, r)), brute, 1e-10);
  }
}

TEST(PartialRankingProbTest, ScaleInvariance) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 7;
    auto lambda = RandomPositive(k, rng);
    const auto r = RandomPartialRanking(k, 4, rng);
    const double base = PlPartialRankingLogProb(lambda, r);
    for (double& v : lambda) v *= 1e-40 + 1e3 * (trial % 2);
    EXPECT_NEAR(PlPartialRankingLogProb(lambda, r), base, 1e-10);
  }
}

TEST(PartialRankingProbTest, FullRankingsSumToOne) {
  Rng rng(6);
  for (int k = 1; k <= 5; ++k) {
    const auto lambda = RandomPositive(k, rng);
    double total = 0.0;
    ForEachCompatiblePermutation(Ranking(k, {}), [&](std::span<const ClassId> s) {
      std::vector<std::vector<ClassId>> blocks;
      for (ClassId c : s) blocks.push_back({c});
      total += std::exp(PlPartialRankingLogProb(lambda, Ranking(k, blocks)));
    });
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(PartialRankingProbTest, SignatureClassesSumToOne) {
  // Every ordered set partition with block sizes (1, 2) of the first three
  // positions: the probabilities over all such rankings sum to one.
  Rng rng(7);
  const int k = 5;
  const auto lambda = RandomPositive(k, rng);
  std::map<std::vector<std::vector<ClassId>>, bool> seen;
  double total = 0.0;
  ForEachCompatiblePermutation(Ranking(k, {}), [&](std::span<const ClassId> s) {
    std::vector<ClassId> second = {s[1], s[2]};
    std::sort(second.begin(), second.end());
    const std::vector<std::vector<ClassId>> blocks = {{s[0]}, second};
    if (!seen.emplace(blocks, true).second) return;
    total += std::exp(PlPartialRankingLogProb(lambda, Ranking(k, blocks)));
  });
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(PartialRankingProbTest, ExtremeWeightsStayFinite) {
  std::vector<double> lambda(12, 1e-200);
  lambda[0] = 1.0;
  const auto r = Ranking(12, {{1, 2, 3, 4, 5, 6}, {0}});
  const double lp = PlPartialRankingLogProb(lambda, r);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_LT(lp, -1000.0);
}

TEST(LogLikelihoodMultiTest, Linearity) {
  const std::vector<double> lambda = {0.2, 0.5, 0.1, 0.2};
  const auto r = Ranking(4, {{2}, {0, 3}});
  const double single = PlPartialRankingLogProb(lambda, r);
  const std::vector<PartialRanking> one = {r};
  const std::vector<PartialRanking> two = {r, r};
  EXPECT_DOUBLE_EQ(PlLogLikelihoodMulti(lambda, one), single);
  EXPECT_NEAR(PlLogLikelihoodMulti(lambda, one, 3), 3 * single, 1e-14);
  EXPECT_NEAR(PlLogLikelihoodMulti(lambda, two), 2 * single, 1e-14);
  EXPECT_UAEVAL_ERROR(PlLogLikelihoodMulti(lambda, one, 0),
                      ErrorCode::kInvalidArgument);
}

TEST(PartialRankingProbTest, BlockCapApplies) {
  const std::vector<double> lambda(30, 1.0);
  std::vector<ClassId> big(22);
  std::iota(big.begin(), big.end(), 0);
  EXPECT_UAEVAL_ERROR(PlPartialRankingLogProb(lambda, Ranking(30, {big})),
                      ErrorCode::kBlockTooLarge);
  // The final block is never expanded, whatever its size.
  EXPECT_NO_THROW(PlPartialRankingLogProb(lambda, Ranking(30, {{0}})));
}

}  // namespace
}  // namespace uaeval
