#include "uaeval/rankings.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "uaeval/errors.h"

namespace uaeval {

ClassSpace::ClassSpace(int num_classes) : size_(num_classes) {
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "class space needs at least one class");
  }
}

void ClassSpace::CheckId(ClassId id) const {
  if (id < 0 || id >= size_) {
    throw Error(ErrorCode::kClassIdOutOfRange,
                "class id " + std::to_string(id) + " not in [0, " +
                    std::to_string(size_) + ")");
  }
}

void ClassSpace::SetName(ClassId id, std::string name) {
  CheckId(id);
  names_[id] = std::move(name);
}

void ClassSpace::SetRisk(ClassId id, int level) {
  CheckId(id);
  if (level < kRiskLow || level > kRiskHigh) {
    throw Error(ErrorCode::kInvalidArgument,
                "risk level must be 0 (low), 1 (medium) or 2 (high)");
  }
  risk_[id] = level;
}

std::optional<std::string_view> ClassSpace::Name(ClassId id) const {
  auto it = names_.find(id);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::string ClassSpace::DisplayName(ClassId id) const {
  auto name = Name(id);
  return name ? std::string(*name) : std::to_string(id);
}

std::optional<ClassId> ClassSpace::FindByName(std::string_view name) const {
  for (const auto& [id, n] : names_) {
    if (n == name) return id;
  }
  return std::nullopt;
}

std::optional<int> ClassSpace::Risk(ClassId id) const {
  auto it = risk_.find(id);
  if (it == risk_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> ClassSpace::RiskVector() const {
  std::vector<int> out(size_);
  for (ClassId k = 0; k < size_; ++k) {
    auto it = risk_.find(k);
    if (it == risk_.end()) {
      throw Error(ErrorCode::kMissingRiskMapping,
                  "no risk level for class " + DisplayName(k));
    }
    out[k] = it->second;
  }
  return out;
}

PartialRanking PartialRanking::Create(int num_classes,
                                      std::vector<std::vector<ClassId>> blocks) {
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "ranking needs at least one class");
  }
  std::vector<bool> seen(num_classes, false);
  for (size_t l = 0; l < blocks.size(); ++l) {
    auto& block = blocks[l];
    if (block.empty()) {
      throw Error(ErrorCode::kEmptyBlock,
                  "block " + std::to_string(l) + " is empty");
    }
    for (ClassId c : block) {
      if (c < 0 || c >= num_classes) {
        throw Error(ErrorCode::kClassIdOutOfRange,
                    "class id " + std::to_string(c) + " not in [0, " +
                        std::to_string(num_classes) + ")");
      }
      if (seen[c]) {
        throw Error(ErrorCode::kDuplicateClassAcrossBlocks,
                    "class " + std::to_string(c) + " appears twice");
      }
      seen[c] = true;
    }
    std::sort(block.begin(), block.end());
  }

  PartialRanking out;
  out.num_classes_ = num_classes;
  out.num_ranked_blocks_ = blocks.size();
  out.blocks_ = std::move(blocks);
  std::vector<ClassId> rest;
  for (ClassId c = 0; c < num_classes; ++c) {
    if (!seen[c]) rest.push_back(c);
  }
  if (!rest.empty()) out.blocks_.push_back(std::move(rest));
  return out;
}

std::span<const ClassId> PartialRanking::Unranked() const {
  if (num_ranked_blocks_ == blocks_.size()) return {};
  return blocks_.back();
}

std::vector<ClassId> PartialRanking::LeadingClasses() const {
  std::vector<ClassId> out;
  for (const auto& block : LeadingBlocks()) {
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<int> PartialRanking::BlockOf() const {
  std::vector<int> out(num_classes_, -1);
  for (size_t l = 0; l < blocks_.size(); ++l) {
    for (ClassId c : blocks_[l]) out[c] = static_cast<int>(l);
  }
  return out;
}

bool PartialRanking::IsFullRanking() const {
  return std::all_of(blocks_.begin(), blocks_.end() - 1,
                     [](const auto& b) { return b.size() == 1; });
}

BlockMatrix ToBlockMatrix(const PartialRanking& ranking) {
  const int k = ranking.num_classes();
  const int l = ranking.num_blocks();
  BlockMatrix out;
  out.b = Eigen::MatrixXd::Zero(l, k);
  out.q = Eigen::MatrixXd::Zero(l, k);
  int position = 0;
  for (int row = 0; row < l; ++row) {
    for (ClassId c : ranking.Blocks()[row]) {
      out.b(row, c) = 1.0;
      out.q(row, position++) = 1.0;
    }
    out.cumulative_sizes.push_back(position);
  }
  return out;
}

Eigen::MatrixXd PermutationMatrix(std::span<const ClassId> sigma) {
  const auto k = static_cast<Eigen::Index>(sigma.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (sigma[i] < 0 || sigma[i] >= k) {
      throw Error(ErrorCode::kClassIdOutOfRange, "not a permutation");
    }
    p(i, sigma[i]) = 1.0;
  }
  return p;
}

Eigen::MatrixXd ToSoftPermutation(const PartialRanking& ranking) {
  const int k = ranking.num_classes();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  int position = 0;
  for (const auto& block : ranking.Blocks()) {
    const double share = 1.0 / static_cast<double>(block.size());
    for (size_t i = 0; i < block.size(); ++i, ++position) {
      for (ClassId c : block) p(position, c) = share;
    }
  }
  return p;
}

bool IsCompatible(const PartialRanking& ranking,
                  std::span<const ClassId> sigma) {
  if (static_cast<int>(sigma.size()) != ranking.num_classes()) return false;
  size_t position = 0;
  for (const auto& block : ranking.Blocks()) {
    std::vector<ClassId> segment(sigma.begin() + position,
                                 sigma.begin() + position + block.size());
    std::sort(segment.begin(), segment.end());
    if (segment != block) return false;
    position += block.size();
  }
  return true;
}

uint64_t CountCompatiblePermutations(const PartialRanking& ranking) {
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  uint64_t count = 1;
  for (const auto& block : ranking.Blocks()) {
    for (uint64_t f = 2; f <= block.size(); ++f) {
      if (count > kMax / f) return kMax;
      count *= f;
    }
  }
  return count;
}

void ForEachCompatiblePermutation(
    const PartialRanking& ranking,
    const std::function<void(std::span<const ClassId>)>& visit,
    uint64_t cap) {
  const uint64_t count = CountCompatiblePermutations(ranking);
  if (count > cap) {
    throw Error(ErrorCode::kCombinatorialCap,
                std::to_string(count) + " compatible permutations exceed cap " +
                    std::to_string(cap));
  }
  // Odometer over per-block permutations; each block segment starts sorted
  // and std::next_permutation walks it back to sorted on wrap-around.
  std::vector<ClassId> sigma;
  std::vector<std::pair<size_t, size_t>> segments;
  for (const auto& block : ranking.Blocks()) {
    segments.emplace_back(sigma.size(), sigma.size() + block.size());
    sigma.insert(sigma.end(), block.begin(), block.end());
  }
  while (true) {
    visit(sigma);
    size_t l = segments.size();
    bool advanced = false;
    while (l-- > 0) {
      auto [begin, end] = segments[l];
      if (std::next_permutation(sigma.begin() + begin, sigma.begin() + end)) {
        advanced = true;
        break;
      }
    }
    if (!advanced) return;
  }
}

std::vector<std::vector<ClassId>> CompatiblePermutations(
    const PartialRanking& ranking, uint64_t cap) {
  std::vector<std::vector<ClassId>> out;
  ForEachCompatiblePermutation(
      ranking,
      [&](std::span<const ClassId> sigma) {
        out.emplace_back(sigma.begin(), sigma.end());
      },
      cap);
  return out;
}

}  // namespace uaeval
