#ifndef UAEVAL_RANKINGS_H_
#define UAEVAL_RANKINGS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace uaeval {

// Dense 0-based class index in [0, K).
using ClassId = int;

// Risk levels on the ordinal scale low = 0, medium = 1, high = 2.
inline constexpr int kRiskLow = 0;
inline constexpr int kRiskMedium = 1;
inline constexpr int kRiskHigh = 2;

inline constexpr uint64_t kDefaultEnumerationCap = 10'000'000;

// The label space: K classes plus optional display names and risk levels.
class ClassSpace {
 public:
  explicit ClassSpace(int num_classes);

  int size() const { return size_; }

  void SetName(ClassId id, std::string name);
  void SetRisk(ClassId id, int level);

  std::optional<std::string_view> Name(ClassId id) const;
  // Name when known, otherwise the decimal id.
  std::string DisplayName(ClassId id) const;
  std::optional<ClassId> FindByName(std::string_view name) const;
  std::optional<int> Risk(ClassId id) const;
  bool HasNames() const { return !names_.empty(); }
  bool HasCompleteRisk() const { return risk_.size() == static_cast<size_t>(size_); }
  // Dense risk vector; throws MissingRiskMapping unless every class has one.
  std::vector<int> RiskVector() const;

  bool operator==(const ClassSpace&) const = default;

 private:
  void CheckId(ClassId id) const;

  int size_;
  std::map<ClassId, std::string> names_;
  std::map<ClassId, int> risk_;
};

// An ordered sequence of disjoint, non-empty blocks of tied classes, most
// plausible first. Classes not mentioned form an implicit trailing block.
// Instances are always valid: construct through PartialRanking::Create.
class PartialRanking {
 public:
  // Validates and canonicalizes (members of each block are sorted). Throws
  // EmptyBlock, DuplicateClassAcrossBlocks or ClassIdOutOfRange.
  static PartialRanking Create(int num_classes,
                               std::vector<std::vector<ClassId>> blocks);

  int num_classes() const { return num_classes_; }

  // Blocks as written by the annotator.
  std::span<const std::vector<ClassId>> RankedBlocks() const {
    return {blocks_.data(), num_ranked_blocks_};
  }
  // The implicit unranked block, possibly empty.
  std::span<const ClassId> Unranked() const;

  // b_1..b_L covering [K): the ranked blocks followed by the unranked block
  // when it is non-empty.
  std::span<const std::vector<ClassId>> Blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }

  // b_1..b_{L-1}: every block except the final one. These are the blocks
  // that carry information; the final block is whatever is left over.
  std::span<const std::vector<ClassId>> LeadingBlocks() const {
    return {blocks_.data(), blocks_.size() - 1};
  }
  std::vector<ClassId> LeadingClasses() const;

  // Block index (into Blocks()) of every class.
  std::vector<int> BlockOf() const;

  bool IsFullRanking() const;

  bool operator==(const PartialRanking&) const = default;

 private:
  PartialRanking() = default;

  int num_classes_ = 0;
  size_t num_ranked_blocks_ = 0;
  std::vector<std::vector<ClassId>> blocks_;
};

// Matrix form of a ranking: B (L x K) marks the members of each block, Q
// (L x K) marks the positions each block occupies, so B = Q P_sigma for every
// compatible permutation sigma.
struct BlockMatrix {
  Eigen::MatrixXd b;
  Eigen::MatrixXd q;
  // c_1..c_L, cumulative block sizes; c_L = K.
  std::vector<int> cumulative_sizes;
};

BlockMatrix ToBlockMatrix(const PartialRanking& ranking);

// [P]_{i,j} = 1 iff sigma_i = j.
Eigen::MatrixXd PermutationMatrix(std::span<const ClassId> sigma);

// Expected permutation matrix under uniform orderings within each block:
// entry (i, j) is the probability class j occupies position i.
Eigen::MatrixXd ToSoftPermutation(const PartialRanking& ranking);

bool IsCompatible(const PartialRanking& ranking,
                  std::span<const ClassId> sigma);

// prod_l |b_l|!, saturating at UINT64_MAX.
uint64_t CountCompatiblePermutations(const PartialRanking& ranking);

// Visits every permutation of [K) compatible with the ranking. Throws
// CombinatorialCap when there are more than `cap` of them.
void ForEachCompatiblePermutation(
    const PartialRanking& ranking,
    const std::function<void(std::span<const ClassId>)>& visit,
    uint64_t cap = kDefaultEnumerationCap);

std::vector<std::vector<ClassId>> CompatiblePermutations(
    const PartialRanking& ranking, uint64_t cap = kDefaultEnumerationCap);

}  // namespace uaeval

#endif  // UAEVAL_RANKINGS_H_
