#include "uaeval/posterior.h"

#include <cmath>

#include "uaeval/errors.h"

namespace uaeval {

PosteriorSamples::PosteriorSamples(int num_classes, Provenance provenance)
    : num_classes_(num_classes), provenance_(std::move(provenance)) {
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "samples need K >= 1");
  }
}

PosteriorSamples PosteriorSamples::PointMass(
    std::span<const double> plausibilities, int num_samples,
    Provenance provenance) {
  if (num_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one sample");
  }
  PosteriorSamples out(static_cast<int>(plausibilities.size()),
                       std::move(provenance));
  out.values_.reserve(plausibilities.size() * num_samples);
  for (int m = 0; m < num_samples; ++m) out.Append(plausibilities);
  return out;
}

void PosteriorSamples::Append(std::span<const double> sample) {
  if (static_cast<int>(sample.size()) != num_classes_) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample has " + std::to_string(sample.size()) +
                    " entries, expected " + std::to_string(num_classes_));
  }
  values_.insert(values_.end(), sample.begin(), sample.end());
  ++num_samples_;
}

std::vector<double> PosteriorSamples::Mean() const {
  std::vector<double> mean(num_classes_, 0.0);
  if (num_samples_ == 0) return mean;
  for (int m = 0; m < num_samples_; ++m) {
    auto row = Sample(m);
    for (int k = 0; k < num_classes_; ++k) mean[k] += row[k];
  }
  for (double& v : mean) v /= num_samples_;
  return mean;
}

std::vector<double> PosteriorSamples::Variance() const {
  std::vector<double> var(num_classes_, 0.0);
  if (num_samples_ < 2) return var;
  const auto mean = Mean();
  for (int m = 0; m < num_samples_; ++m) {
    auto row = Sample(m);
    for (int k = 0; k < num_classes_; ++k) {
      const double d = row[k] - mean[k];
      var[k] += d * d;
    }
  }
  for (double& v : var) v /= (num_samples_ - 1);
  return var;
}

bool PosteriorSamples::IsNormalized(double tolerance) const {
  for (int m = 0; m < num_samples_; ++m) {
    double total = 0.0;
    for (double v : Sample(m)) {
      if (!(v >= 0.0)) return false;
      total += v;
    }
    if (std::abs(total - 1.0) > tolerance) return false;
  }
  return true;
}

}  // namespace uaeval
