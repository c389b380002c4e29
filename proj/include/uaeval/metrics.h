#ifndef UAEVAL_METRICS_H_
#define UAEVAL_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uaeval/posterior.h"
#include "uaeval/rankings.h"

namespace uaeval {

// A classifier's classes in logit order; the first k form C_top-k.
struct PredictionSet {
  std::string case_id;
  std::vector<ClassId> ranked;

  // Throws InvalidArgument on duplicates and ClassIdOutOfRange.
  void Validate(int num_classes) const;
  std::vector<ClassId> TopK(int k) const;
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void Add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Class ids of the k largest entries, sorted ascending. Ties go to the lower
// id, matching Top1Label.
std::vector<ClassId> TopKSet(std::span<const double> plausibilities, int k);

// Fraction of samples whose argmax is y.
double CertaintyLabel(const PosteriorSamples& samples, ClassId y);

// Frequency of the most common top-j set among the samples. Only sets that
// some sample realizes are candidates.
double AnnotationCertaintyTopJ(const PosteriorSamples& samples, int j);

// |C n Y| / |C|.
double Overlap(std::span<const ClassId> prediction,
               std::span<const ClassId> target);

// Per-sample values of the uncertainty-adjusted metrics; the metric itself is
// the mean over samples.
std::vector<double> UaTopKPerSample(const PosteriorSamples& samples,
                                    const PredictionSet& prediction, int k);
std::vector<double> UaSetAccuracyPerSample(const PosteriorSamples& samples,
                                           const PredictionSet& prediction,
                                           int k);
std::vector<double> UaAverageOverlapPerSample(const PosteriorSamples& samples,
                                              const PredictionSet& prediction,
                                              int depth);

// Monte Carlo mean of 1[argmax(lambda) in C_top-k].
double UaTopKAccuracy(const PosteriorSamples& samples,
                      const PredictionSet& prediction, int k);
// Monte Carlo mean of 1[top-k set of lambda == C_top-k].
double UaSetAccuracy(const PosteriorSamples& samples,
                     const PredictionSet& prediction, int k);
// (1/L) sum_{k<=L} E[Overlap(C_top-k, top-k set of lambda)].
double UaAverageOverlap(const PosteriorSamples& samples,
                        const PredictionSet& prediction, int depth);

// Average overlap between two complete orderings:
// (1/L) sum_{k<=L} |sigma_{1:k} n sigma'_{1:k}| / k.
double AverageOverlap(std::span<const ClassId> sigma,
                      std::span<const ClassId> other, int depth);

// Unnormalized average overlap between two partial rankings via soft
// permutation matrices, Tr{(T P'_soft)^T D_L (T P_soft)}.
double UnnormalizedAverageOverlapPartial(const PartialRanking& a,
                                         const PartialRanking& b, int depth);

// Normalized so that a ranking compared with itself scores exactly one.
double MeanAverageOverlapPartial(const PartialRanking& a,
                                 const PartialRanking& b, int depth);

struct RiskReport {
  // Frequency of the modal top-1 risk level, where each sample's risk level
  // is the argmax of its aggregated risk distribution P(rho).
  double risk_certainty = 0.0;
  // Per-sample sum_k lambda_k * risk(k).
  std::vector<double> expected_risk;
  double expected_risk_mean = 0.0;
  double expected_risk_min = 0.0;
  double expected_risk_max = 0.0;
  // Mean of 1[risk of the predicted top-1 == sample's top-1 risk level].
  std::optional<double> risk_accuracy;
};

// `risk` holds one level per class. Throws MissingRiskMapping when its size
// does not cover the class space.
RiskReport RiskMetrics(const PosteriorSamples& samples,
                       std::span<const int> risk,
                       const PredictionSet* prediction = nullptr);

// Leave-one-out agreement: the share of annotators whose leading classes
// contain the IRN top-1 of everyone else. A held-out annotator whose peers
// ranked nothing counts as disagreeing.
double LooAgreement(std::span<const PartialRanking> rankings);

// Dataset-level view of one metric: per-case Monte Carlo means plus the
// spread of the dataset mean across sample index m.
struct MetricSummary {
  std::vector<double> per_case;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> per_sample_means;
  double histogram_low = 0.0;
  double histogram_high = 0.0;
  std::vector<int> histogram;
};

// `values[c][m]` is the metric for case c under sample m; every case must
// have the same number of samples.
MetricSummary SummarizeMetric(const std::vector<std::vector<double>>& values,
                              int histogram_bins);

}  // namespace uaeval

#endif  // UAEVAL_METRICS_H_
