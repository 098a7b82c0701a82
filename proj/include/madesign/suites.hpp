#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "madesign/verification.hpp"

namespace madesign {

/// Outcome of one named property campaign.
struct SuiteReport {
  std::string name;
  int passed = 0;
  int failed = 0;
  std::vector<std::string> failures;  // first few failure descriptions

  bool ok() const { return failed == 0 && passed > 0; }
  void check(bool cond, const std::string& what);
};

/// Matrix Cauchy-Schwarz campaign: random instances of the lemma and the
/// corollary, plus constructed-equality and perturbed-equality detector cases.
SuiteReport suite_mcs(int trials, uint64_t seed);

/// Gradient identities: closed forms vs the psi route (1e-8) vs central
/// finite differences (1e-5), plus the T-involution and trace contraction.
SuiteReport suite_gradients(const std::vector<Criterion>& crits, int trials,
                            uint64_t seed);

/// Monotonicity of the multiplicative algorithm on random instances across
/// lambda in {0.1, 0.25, 0.5, 0.75, 1.0}, with the strict-monotonicity
/// sub-checks where the theory guarantees them.
SuiteReport suite_monotonicity(const std::vector<Criterion>& crits,
                               int instances, long iters, uint64_t seed);

/// Objective-gap contraction on the two-point example for each lambda.
SuiteReport suite_rate(const std::vector<double>& lambdas, uint64_t seed);

/// The worked examples: cycling at lambda = 1, one-step convergence at 1/2,
/// the mirror symmetry, the c-criterion breakdown, and the generalized
/// coordinate-dropping run with its linear rate.
SuiteReport suite_examples();

/// True when the criterion's psi is strictly concave and strictly isotonic,
/// i.e. strict monotonicity is guaranteed even at lambda = 1.
bool strict_at_lambda_one(const Criterion& crit);

}  // namespace madesign
