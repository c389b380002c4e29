#include "uaeval/random.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uaeval/errors.h"

namespace uaeval {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t base_seed, std::string_view key) {
  // FNV-1a over the key, then mixed with the base seed.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(base_seed) ^ h);
}

double LogGammaVariate(double shape, Rng& rng) {
  if (!(shape > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma shape must be positive");
  }
  if (shape >= 1.0) {
    std::gamma_distribution<double> gamma(shape, 1.0);
    return std::log(gamma(rng));
  }
  // G(a) = G(a + 1) * U^(1/a).
  std::gamma_distribution<double> gamma(shape + 1.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double u = uniform(rng);
  while (u <= 0.0) u = uniform(rng);
  return std::log(gamma(rng)) + std::log(u) / shape;
}

double GammaVariate(double shape, double rate, Rng& rng) {
  if (!(rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma rate must be positive");
  }
  return std::exp(LogGammaVariate(shape, rng)) / rate;
}

double ExponentialVariate(double rate, Rng& rng) {
  if (!(rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "exponential rate must be positive");
  }
  std::exponential_distribution<double> exponential(rate);
  return exponential(rng);
}

std::vector<double> SampleDirichlet(std::span<const double> concentration,
                                    Rng& rng) {
  std::vector<double> logs(concentration.size(),
                           -std::numeric_limits<double>::infinity());
  double max_log = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < concentration.size(); ++k) {
    const double a = concentration[k];
    if (a < 0.0 || std::isnan(a)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "Dirichlet concentration must be non-negative");
    }
    if (a == 0.0) continue;
    logs[k] = LogGammaVariate(a, rng);
    max_log = std::max(max_log, logs[k]);
  }
  if (max_log == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kInvalidArgument,
                "Dirichlet needs at least one positive concentration");
  }
  std::vector<double> out(concentration.size(), 0.0);
  double total = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    if (concentration[k] == 0.0) continue;
    out[k] = std::exp(logs[k] - max_log);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace uaeval
