#ifndef UAEVAL_SELFCHECK_H_
#define UAEVAL_SELFCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

namespace uaeval {

struct SelfcheckOptions {
  uint64_t seed = 7;
  // Test hook: perturbs every sampler's output before the normalization
  // suite inspects it, so that suite must fail.
  bool corrupt_normalization = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Oracle-equivalence suites: DP likelihood vs enumeration, Gibbs vs grid
// quadrature, metric reduction to the deterministic case, IRN hand values and
// sampler normalization.
std::vector<SuiteResult> RunSelfcheck(const SelfcheckOptions& options = {});

}  // namespace uaeval

#endif  // UAEVAL_SELFCHECK_H_
