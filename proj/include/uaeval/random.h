#ifndef UAEVAL_RANDOM_H_
#define UAEVAL_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace uaeval {

using Rng = std::mt19937_64;

// Mixes a base seed with a string key (case id, model tag, ...) so that
// per-case streams do not depend on scheduling order.
uint64_t DeriveSeed(uint64_t base_seed, std::string_view key);

// log of a Gamma(shape, 1) variate. Stays finite for shapes far below 1,
// where the variate itself underflows double precision.
double LogGammaVariate(double shape, Rng& rng);

// Gamma(shape, rate) variate, rate parameterization.
double GammaVariate(double shape, double rate, Rng& rng);

double ExponentialVariate(double rate, Rng& rng);

// Dirichlet draw. Zero concentrations yield exactly zero coordinates; at least
// one concentration must be positive.
std::vector<double> SampleDirichlet(std::span<const double> concentration,
                                    Rng& rng);

}  // namespace uaeval

#endif  // UAEVAL_RANDOM_H_
