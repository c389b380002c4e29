#ifndef UAEVAL_POSTERIOR_H_
#define UAEVAL_POSTERIOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uaeval {

// Where a set of plausibility samples came from. Every report row repeats it.
struct Provenance {
  std::string model;
  double reliability = 0.0;
  uint64_t seed = 0;

  bool operator==(const Provenance&) const = default;
};

// M plausibility vectors over K classes, stored row-major.
class PosteriorSamples {
 public:
  PosteriorSamples(int num_classes, Provenance provenance);

  // M copies of one deterministic plausibility vector.
  static PosteriorSamples PointMass(std::span<const double> plausibilities,
                                    int num_samples, Provenance provenance);

  void Append(std::span<const double> sample);

  int num_samples() const { return num_samples_; }
  int num_classes() const { return num_classes_; }
  const Provenance& provenance() const { return provenance_; }

  std::span<const double> Sample(int m) const {
    return {values_.data() + static_cast<size_t>(m) * num_classes_,
            static_cast<size_t>(num_classes_)};
  }
  std::span<double> MutableSample(int m) {
    return {values_.data() + static_cast<size_t>(m) * num_classes_,
            static_cast<size_t>(num_classes_)};
  }
  std::span<const double> values() const { return values_; }

  std::vector<double> Mean() const;
  // Unbiased per-coordinate variance; zeros when M = 1.
  std::vector<double> Variance() const;

  // Every row non-negative and summing to one within `tolerance`.
  bool IsNormalized(double tolerance = 1e-9) const;

 private:
  int num_classes_;
  int num_samples_ = 0;
  Provenance provenance_;
  std::vector<double> values_;
};

}  // namespace uaeval

#endif  // UAEVAL_POSTERIOR_H_
