#include "uaeval/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "uaeval/errors.h"
#include "uaeval/irn.h"

namespace uaeval {
namespace {

void CheckNonEmpty(const PosteriorSamples& samples) {
  if (samples.num_samples() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "metrics need at least 1 sample");
  }
}

void CheckDepth(int k, size_t available, const char* what) {
  if (k < 1 || static_cast<size_t>(k) > available) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " " + std::to_string(k) +
                    " outside [1, " + std::to_string(available) + "]");
  }
}

// Class ids ordered by decreasing plausibility, ties by increasing id; only
// the first `depth` entries are ordered.
std::vector<ClassId> TopOrder(std::span<const double> plausibilities,
                              int depth) {
  std::vector<ClassId> order(plausibilities.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + depth, order.end(),
                    [&](ClassId a, ClassId b) {
                      if (plausibilities[a] != plausibilities[b]) {
                        return plausibilities[a] > plausibilities[b];
                      }
                      return a < b;
                    });
  order.resize(depth);
  return order;
}

double Mean(const std::vector<double>& values) {
  CompensatedSum sum;
  for (double v : values) sum.Add(v);
  return sum.value() / static_cast<double>(values.size());
}

// Cumulative row sums of the soft permutation matrix, first `depth` rows:
// row i holds the expected membership of each class in the top-(i+1) prefix.
Eigen::MatrixXd SoftPrefixMembership(const PartialRanking& ranking,
                                     int depth) {
  const Eigen::MatrixXd soft = ToSoftPermutation(ranking);
  Eigen::MatrixXd prefix(depth, soft.cols());
  prefix.row(0) = soft.row(0);
  for (int i = 1; i < depth; ++i) prefix.row(i) = prefix.row(i - 1) + soft.row(i);
  return prefix;
}

}  // namespace

void PredictionSet::Validate(int num_classes) const {
  std::vector<bool> seen(num_classes, false);
  for (ClassId c : ranked) {
    if (c < 0 || c >= num_classes) {
      throw Error(ErrorCode::kClassIdOutOfRange,
                  "prediction for case '" + case_id + "' names class " +
                      std::to_string(c));
    }
    if (seen[c]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "prediction for case '" + case_id + "' repeats class " +
                      std::to_string(c));
    }
    seen[c] = true;
  }
}

std::vector<ClassId> PredictionSet::TopK(int k) const {
  CheckDepth(k, ranked.size(), "prediction depth");
  return {ranked.begin(), ranked.begin() + k};
}

void CompensatedSum::Add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

std::vector<ClassId> TopKSet(std::span<const double> plausibilities, int k) {
  CheckDepth(k, plausibilities.size(), "top-k size");
  auto top = TopOrder(plausibilities, k);
  std::sort(top.begin(), top.end());
  return top;
}

double CertaintyLabel(const PosteriorSamples& samples, ClassId y) {
  CheckNonEmpty(samples);
  int hits = 0;
  for (int m = 0; m < samples.num_samples(); ++m) {
    if (Top1Label(samples.Sample(m)) == y) ++hits;
  }
  return static_cast<double>(hits) / samples.num_samples();
}

double AnnotationCertaintyTopJ(const PosteriorSamples& samples, int j) {
  CheckNonEmpty(samples);
  CheckDepth(j, samples.num_classes(), "top-j size");
  std::map<std::vector<ClassId>, int> frequency;
  int best = 0;
  for (int m = 0; m < samples.num_samples(); ++m) {
    best = std::max(best, ++frequency[TopKSet(samples.Sample(m), j)]);
  }
  return static_cast<double>(best) / samples.num_samples();
}

double Overlap(std::span<const ClassId> prediction,
               std::span<const ClassId> target) {
  if (prediction.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "overlap of an empty prediction");
  }
  int shared = 0;
  for (ClassId c : prediction) {
    if (std::find(target.begin(), target.end(), c) != target.end()) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(prediction.size());
}

std::vector<double> UaTopKPerSample(const PosteriorSamples& samples,
                                    const PredictionSet& prediction, int k) {
  CheckNonEmpty(samples);
  const auto top = prediction.TopK(k);
  std::vector<double> out(samples.num_samples());
  for (int m = 0; m < samples.num_samples(); ++m) {
    const ClassId label = Top1Label(samples.Sample(m));
    out[m] = std::find(top.begin(), top.end(), label) != top.end() ? 1.0 : 0.0;
  }
  return out;
}

std::vector<double> UaSetAccuracyPerSample(const PosteriorSamples& samples,
                                           const PredictionSet& prediction,
                                           int k) {
  CheckNonEmpty(samples);
  auto top = prediction.TopK(k);
  std::sort(top.begin(), top.end());
  std::vector<double> out(samples.num_samples());
  for (int m = 0; m < samples.num_samples(); ++m) {
    out[m] = TopKSet(samples.Sample(m), k) == top ? 1.0 : 0.0;
  }
  return out;
}

std::vector<double> UaAverageOverlapPerSample(const PosteriorSamples& samples,
                                              const PredictionSet& prediction,
                                              int depth) {
  CheckNonEmpty(samples);
  CheckDepth(depth, prediction.ranked.size(), "average overlap depth");
  CheckDepth(depth, samples.num_classes(), "average overlap depth");
  std::vector<double> out(samples.num_samples());
  for (int m = 0; m < samples.num_samples(); ++m) {
    out[m] = AverageOverlap(prediction.ranked, TopOrder(samples.Sample(m), depth),
                            depth);
  }
  return out;
}

double UaTopKAccuracy(const PosteriorSamples& samples,
                      const PredictionSet& prediction, int k) {
  return Mean(UaTopKPerSample(samples, prediction, k));
}

double UaSetAccuracy(const PosteriorSamples& samples,
                     const PredictionSet& prediction, int k) {
  return Mean(UaSetAccuracyPerSample(samples, prediction, k));
}

double UaAverageOverlap(const PosteriorSamples& samples,
                        const PredictionSet& prediction, int depth) {
  return Mean(UaAverageOverlapPerSample(samples, prediction, depth));
}

double AverageOverlap(std::span<const ClassId> sigma,
                      std::span<const ClassId> other, int depth) {
  CheckDepth(depth, std::min(sigma.size(), other.size()),
             "average overlap depth");
  // shared = |sigma_{1:k} n other_{1:k}|, maintained incrementally.
  std::set<ClassId> prefix, other_prefix;
  int shared = 0;
  double total = 0.0;
  for (int k = 0; k < depth; ++k) {
    prefix.insert(sigma[k]);
    other_prefix.insert(other[k]);
    if (sigma[k] == other[k]) {
      ++shared;
    } else {
      shared += static_cast<int>(other_prefix.count(sigma[k]));
      shared += static_cast<int>(prefix.count(other[k]));
    }
    total += static_cast<double>(shared) / (k + 1);
  }
  return total / depth;
}

double UnnormalizedAverageOverlapPartial(const PartialRanking& a,
                                         const PartialRanking& b, int depth) {
  if (a.num_classes() != b.num_classes()) {
    throw Error(ErrorCode::kInvalidArgument,
                "rankings disagree on the number of classes");
  }
  CheckDepth(depth, a.num_classes(), "average overlap depth");
  const Eigen::MatrixXd prefix_a = SoftPrefixMembership(a, depth);
  const Eigen::MatrixXd prefix_b = SoftPrefixMembership(b, depth);
  double total = 0.0;
  for (int i = 0; i < depth; ++i) {
    total += prefix_a.row(i).dot(prefix_b.row(i)) /
             (static_cast<double>(i + 1) * depth);
  }
  return total;
}

double MeanAverageOverlapPartial(const PartialRanking& a,
                                 const PartialRanking& b, int depth) {
  const double cross = UnnormalizedAverageOverlapPartial(a, b, depth);
  const double self_a = UnnormalizedAverageOverlapPartial(a, a, depth);
  const double self_b = UnnormalizedAverageOverlapPartial(b, b, depth);
  return cross / std::sqrt(self_a * self_b);
}

RiskReport RiskMetrics(const PosteriorSamples& samples,
                       std::span<const int> risk,
                       const PredictionSet* prediction) {
  CheckNonEmpty(samples);
  if (static_cast<int>(risk.size()) != samples.num_classes()) {
    throw Error(ErrorCode::kMissingRiskMapping,
                "risk map covers " + std::to_string(risk.size()) + " of " +
                    std::to_string(samples.num_classes()) + " classes");
  }
  for (int r : risk) {
    if (r < kRiskLow || r > kRiskHigh) {
      throw Error(ErrorCode::kMissingRiskMapping, "risk level outside {0,1,2}");
    }
  }
  std::optional<int> predicted_risk;
  if (prediction != nullptr) {
    prediction->Validate(samples.num_classes());
    predicted_risk = risk[prediction->TopK(1).front()];
  }

  RiskReport out;
  int level_counts[3] = {0, 0, 0};
  int risk_hits = 0;
  out.expected_risk.resize(samples.num_samples());
  for (int m = 0; m < samples.num_samples(); ++m) {
    const auto lambda = samples.Sample(m);
    double mass[3] = {0.0, 0.0, 0.0};
    double expected = 0.0;
    for (size_t k = 0; k < lambda.size(); ++k) {
      mass[risk[k]] += lambda[k];
      expected += lambda[k] * risk[k];
    }
    const int level = Top1Label(mass);
    ++level_counts[level];
    if (predicted_risk && *predicted_risk == level) ++risk_hits;
    out.expected_risk[m] = expected;
  }
  out.risk_certainty =
      static_cast<double>(*std::max_element(level_counts, level_counts + 3)) /
      samples.num_samples();
  out.expected_risk_mean = Mean(out.expected_risk);
  const auto [lo, hi] =
      std::minmax_element(out.expected_risk.begin(), out.expected_risk.end());
  out.expected_risk_min = *lo;
  out.expected_risk_max = *hi;
  if (predicted_risk) {
    out.risk_accuracy = static_cast<double>(risk_hits) / samples.num_samples();
  }
  return out;
}

double LooAgreement(std::span<const PartialRanking> rankings) {
  if (rankings.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "leave-one-out agreement needs at least two annotators");
  }
  int agree = 0;
  for (size_t r = 0; r < rankings.size(); ++r) {
    std::vector<PartialRanking> others;
    for (size_t o = 0; o < rankings.size(); ++o) {
      if (o != r) others.push_back(rankings[o]);
    }
    std::vector<double> peer_scores;
    try {
      peer_scores = IrnAggregate(others).normalized;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAllZeroMass) throw;
      continue;
    }
    const ClassId label = Top1Label(peer_scores);
    const auto leading = rankings[r].LeadingClasses();
    if (std::find(leading.begin(), leading.end(), label) != leading.end()) {
      ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(rankings.size());
}

MetricSummary SummarizeMetric(const std::vector<std::vector<double>>& values,
                              int histogram_bins) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to summarize");
  }
  if (histogram_bins < 1) {
    throw Error(ErrorCode::kConfigError, "histogram needs at least one bin");
  }
  const size_t num_samples = values.front().size();
  for (const auto& row : values) {
    if (row.size() != num_samples || row.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "every case needs the same, non-zero number of samples");
    }
  }
  MetricSummary out;
  CompensatedSum dataset;
  for (const auto& row : values) {
    out.per_case.push_back(Mean(row));
    dataset.Add(out.per_case.back());
  }
  out.mean = dataset.value() / static_cast<double>(values.size());

  out.per_sample_means.resize(num_samples);
  for (size_t m = 0; m < num_samples; ++m) {
    CompensatedSum sum;
    for (const auto& row : values) sum.Add(row[m]);
    out.per_sample_means[m] = sum.value() / static_cast<double>(values.size());
  }
  const double sample_mean = Mean(out.per_sample_means);
  if (num_samples > 1) {
    CompensatedSum squares;
    for (double v : out.per_sample_means) {
      squares.Add((v - sample_mean) * (v - sample_mean));
    }
    out.sd = std::sqrt(squares.value() / static_cast<double>(num_samples - 1));
  }
  const auto [lo, hi] = std::minmax_element(out.per_sample_means.begin(),
                                            out.per_sample_means.end());
  out.min = *lo;
  out.max = *hi;
  // The dataset mean equals the average of the per-sample means up to
  // rounding; pin it inside their range.
  out.mean = std::clamp(out.mean, out.min, out.max);

  out.histogram_low = out.min;
  out.histogram_high = out.max;
  out.histogram.assign(histogram_bins, 0);
  const double width = (out.max - out.min) / histogram_bins;
  for (double v : out.per_sample_means) {
    int bin = width > 0.0 ? static_cast<int>((v - out.min) / width) : 0;
    bin = std::clamp(bin, 0, histogram_bins - 1);
    ++out.histogram[bin];
  }
  return out;
}

}  // namespace uaeval
