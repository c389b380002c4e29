#include "uaeval/sim_oracle.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "uaeval/errors.h"
#include "uaeval/pl_likelihood.h"
#include "uaeval/random.h"

namespace uaeval {
namespace {

uint64_t Factorial(size_t n, uint64_t cap) {
  uint64_t out = 1;
  for (uint64_t f = 2; f <= n; ++f) {
    if (out > cap / f) return cap + 1;
    out *= f;
  }
  return out;
}

// Probability that a PL draw starts with `prefix`, given the total mass.
double PrefixProbability(std::span<const double> lambda,
                         std::span<const ClassId> prefix, double total) {
  double prob = 1.0;
  double remaining = total;
  for (ClassId c : prefix) {
    prob *= lambda[c] / remaining;
    remaining -= lambda[c];
  }
  return prob;
}

}  // namespace

void SimSpec::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfigError, what);
  };
  if (num_classes < 1) fail("num_classes must be >= 1");
  if (static_cast<int>(lambda.size()) != num_classes) {
    fail("lambda must have num_classes entries");
  }
  double total = 0.0;
  for (double v : lambda) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail("lambda must be non-negative");
    total += v;
  }
  if (!(total > 0.0)) fail("lambda needs positive mass");
  if (num_annotators < 0) fail("num_annotators must be >= 0");
  int ranked = 0;
  for (int s : block_sizes) {
    if (s < 1) fail("block sizes must be >= 1");
    ranked += s;
  }
  if (ranked > num_classes) fail("block sizes exceed num_classes");
  if (!(noise >= 0.0 && noise <= 1.0)) fail("noise must lie in [0, 1]");
}

std::vector<int> ParseBlockPolicy(std::string_view policy, int num_classes) {
  if (policy == "full") return std::vector<int>(num_classes, 1);
  std::vector<int> sizes;
  while (!policy.empty()) {
    const size_t comma = policy.find(',');
    const std::string_view item = policy.substr(0, comma);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size() || value < 1) {
      throw Error(ErrorCode::kConfigError,
                  "bad block policy entry '" + std::string(item) + "'");
    }
    sizes.push_back(value);
    if (comma == std::string_view::npos) break;
    policy.remove_prefix(comma + 1);
  }
  return sizes;
}

std::vector<PartialRanking> SimulateAnnotations(const SimSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::vector<double> flat(spec.num_classes, 1.0);
  std::vector<PartialRanking> out;
  out.reserve(spec.num_annotators);
  for (int r = 0; r < spec.num_annotators; ++r) {
    const bool noisy = spec.noise > 0.0 && uniform(rng) < spec.noise;
    const auto& weights = noisy ? flat : spec.lambda;
    // Exponential race: sorting arrival times gives a PL ordering.
    std::vector<double> arrival(spec.num_classes);
    for (int k = 0; k < spec.num_classes; ++k) {
      arrival[k] = weights[k] > 0.0
                       ? ExponentialVariate(weights[k], rng)
                       : std::numeric_limits<double>::infinity();
    }
    std::vector<ClassId> order(spec.num_classes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](ClassId a, ClassId b) {
      return arrival[a] < arrival[b];
    });
    std::vector<std::vector<ClassId>> blocks;
    size_t position = 0;
    for (int size : spec.block_sizes) {
      blocks.emplace_back(order.begin() + position,
                          order.begin() + position + size);
      position += size;
    }
    out.push_back(PartialRanking::Create(spec.num_classes, std::move(blocks)));
  }
  return out;
}

PartialRanking RandomPartialRanking(int num_classes, int max_block_size,
                                    Rng& rng) {
  if (num_classes < 1 || max_block_size < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need num_classes >= 1 and max_block_size >= 1");
  }
  std::vector<ClassId> order(num_classes);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<ClassId>> blocks;
  std::uniform_int_distribution<int> size_dist(1, max_block_size);
  for (size_t pos = 0; pos < order.size();) {
    const size_t size =
        std::min<size_t>(size_dist(rng), order.size() - pos);
    blocks.emplace_back(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  std::uniform_int_distribution<size_t> keep_dist(0, blocks.size());
  blocks.resize(keep_dist(rng));
  return PartialRanking::Create(num_classes, std::move(blocks));
}

double BruteForcePartialProb(std::span<const double> lambda,
                             const PartialRanking& ranking, uint64_t cap) {
  CheckPositiveWeights(lambda);
  if (static_cast<int>(lambda.size()) != ranking.num_classes()) {
    throw Error(ErrorCode::kInvalidArgument, "weights do not match ranking");
  }
  const auto leading = ranking.LeadingBlocks();
  uint64_t count = 1;
  for (const auto& block : leading) {
    const uint64_t f = Factorial(block.size(), cap);
    if (f > cap || count > cap / f) {
      throw Error(ErrorCode::kCombinatorialCap,
                  "leading-block orderings exceed cap " + std::to_string(cap));
    }
    count *= f;
  }
  double total = 0.0;
  for (double v : lambda) total += v;

  std::vector<ClassId> prefix;
  std::vector<std::pair<size_t, size_t>> segments;
  for (const auto& block : leading) {
    segments.emplace_back(prefix.size(), prefix.size() + block.size());
    prefix.insert(prefix.end(), block.begin(), block.end());
  }
  double sum = 0.0;
  while (true) {
    sum += PrefixProbability(lambda, prefix, total);
    size_t l = segments.size();
    bool advanced = false;
    while (l-- > 0) {
      auto [begin, end] = segments[l];
      if (std::next_permutation(prefix.begin() + begin, prefix.begin() + end)) {
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return sum;
}

double BruteForceCompleteProb(std::span<const double> lambda,
                              const PartialRanking& ranking, uint64_t cap) {
  CheckPositiveWeights(lambda);
  if (static_cast<int>(lambda.size()) != ranking.num_classes()) {
    throw Error(ErrorCode::kInvalidArgument, "weights do not match ranking");
  }
  double total = 0.0;
  for (double v : lambda) total += v;
  double sum = 0.0;
  ForEachCompatiblePermutation(
      ranking,
      [&](std::span<const ClassId> sigma) {
        sum += PrefixProbability(lambda, sigma, total);
      },
      cap);
  return sum;
}

GridMoments GridPosteriorOracle(std::span<const PartialRanking> rankings,
                                int num_classes, double alpha, int resolution,
                                int repetitions) {
  if (num_classes < 1 || num_classes > 3) {
    throw Error(ErrorCode::kTooManyClasses,
                "grid oracle supports K <= 3, got " +
                    std::to_string(num_classes));
  }
  if (!(alpha > 0.0) || resolution < 1 || repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid oracle needs alpha > 0, resolution >= 1, repetitions >= 1");
  }
  for (const auto& r : rankings) {
    if (r.num_classes() != num_classes) {
      throw Error(ErrorCode::kInvalidArgument, "ranking class count mismatch");
    }
  }
  GridMoments out;
  if (num_classes == 1) {
    out.mean = {1.0};
    out.variance = {0.0};
    return out;
  }

  // Equal-area cells, one node each (the cell centroid).
  std::vector<std::vector<double>> nodes;
  const double n = resolution;
  if (num_classes == 2) {
    for (int i = 0; i < resolution; ++i) {
      const double x = (i + 0.5) / n;
      nodes.push_back({x, 1.0 - x});
    }
  } else {
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; i + j < resolution; ++j) {
        const double x = (i + 1.0 / 3.0) / n, y = (j + 1.0 / 3.0) / n;
        nodes.push_back({x, y, 1.0 - x - y});
        if (i + j + 1 < resolution) {
          const double u = (i + 2.0 / 3.0) / n, v = (j + 2.0 / 3.0) / n;
          nodes.push_back({u, v, 1.0 - u - v});
        }
      }
    }
  }
  std::vector<double> log_weight(nodes.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nodes.size(); ++i) {
    double lw = 0.0;
    for (double x : nodes[i]) lw += (alpha - 1.0) * std::log(x);
    for (const auto& r : rankings) {
      lw += repetitions * std::log(BruteForcePartialProb(nodes[i], r));
    }
    log_weight[i] = lw;
    max_log = std::max(max_log, lw);
  }
  double z = 0.0;
  std::vector<double> m1(num_classes, 0.0), m2(num_classes, 0.0);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double w = std::exp(log_weight[i] - max_log);
    z += w;
    for (int k = 0; k < num_classes; ++k) {
      m1[k] += w * nodes[i][k];
      m2[k] += w * nodes[i][k] * nodes[i][k];
    }
  }
  for (int k = 0; k < num_classes; ++k) {
    const double mean = m1[k] / z;
    out.mean.push_back(mean);
    out.variance.push_back(m2[k] / z - mean * mean);
  }
  return out;
}

}  // namespace uaeval
