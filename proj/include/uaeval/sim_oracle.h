#ifndef UAEVAL_SIM_ORACLE_H_
#define UAEVAL_SIM_ORACLE_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "uaeval/random.h"
#include "uaeval/rankings.h"

namespace uaeval {

// Synthetic annotators drawing Plackett-Luce orderings from known weights.
struct SimSpec {
  int num_classes = 0;
  // True plausibilities; zeros allowed (those classes always come last).
  std::vector<double> lambda;
  int num_annotators = 1;
  // Sizes of the ranked blocks, in order. Everything past them is unranked.
  std::vector<int> block_sizes;
  // Probability that an annotator ignores lambda and ranks uniformly at
  // random; 0 gives a faithful annotator pool.
  double noise = 0.0;
  uint64_t seed = 0;

  void Validate() const;
};

// "1,2" -> {1, 2}; "full" -> K singleton blocks.
std::vector<int> ParseBlockPolicy(std::string_view policy, int num_classes);

std::vector<PartialRanking> SimulateAnnotations(const SimSpec& spec);

// Uniformly shuffled classes cut into blocks of 1..max_block_size members;
// a random number of leading blocks (possibly all) is kept as ranked.
PartialRanking RandomPartialRanking(int num_classes, int max_block_size,
                                    Rng& rng);

// p(b | lambda) by summing the PL probability of every ordering of the
// leading blocks; the final block's orderings sum to one and are skipped.
double BruteForcePartialProb(std::span<const double> lambda,
                             const PartialRanking& ranking,
                             uint64_t cap = kDefaultEnumerationCap);

// The same probability summed over complete orderings of all K classes.
double BruteForceCompleteProb(std::span<const double> lambda,
                              const PartialRanking& ranking,
                              uint64_t cap = kDefaultEnumerationCap);

struct GridMoments {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Posterior moments of the normalized plausibilities under a
// Dirichlet(alpha, ..., alpha) prior and the PL likelihood (each annotation
// counted `repetitions` times), by midpoint quadrature on a regular
// barycentric lattice with `resolution` cells per edge. K <= 3.
GridMoments GridPosteriorOracle(std::span<const PartialRanking> rankings,
                                int num_classes, double alpha, int resolution,
                                int repetitions = 1);

}  // namespace uaeval

#endif  // UAEVAL_SIM_ORACLE_H_
