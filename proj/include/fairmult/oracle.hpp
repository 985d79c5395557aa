#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairmult/empdist.hpp"
#include "fairmult/metrics.hpp"
#include "fairmult/rational.hpp"

namespace fairmult {

// Brute-force verification of the bound machinery on small instances.  Every
// comparison is exact (rational), so a VIOLATION verdict means a real bug,
// never rounding noise.

enum class Verdict { tight, sound_not_tight, violation };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::tight: return "tight";
        case Verdict::sound_not_tight: return "sound_not_tight";
        default: return "VIOLATION";
    }
}

struct OracleResult {
    std::string quantity;
    Rat exact_value;
    Rat bound_value;
    Classifier witness;
    Verdict verdict = Verdict::tight;
};

// Exhaustive max d(F, Bayes) over deterministic F with Acc(F) >= Acc(Bayes)
// - eps, via Gray-code enumeration of all 2^n classifiers; compared against
// multiplicity_bound.  Throws if n exceeds `cap` (use the sampled variant).
OracleResult max_disagreement_exact(const EmpiricalDistribution& dist,
                                    const Rat& eps, int cap = 20);

// Sampling fallback beyond the cap: best over `trials` uniformly random
// classifiers; a lower bound on the true maximum, flagged sound_not_tight
// unless it happens to meet the bound.
OracleResult max_disagreement_sampled(const EmpiricalDistribution& dist,
                                      const Rat& eps, int trials,
                                      std::uint64_t seed);

// Exhaustive max |DI(F) - DI(G)| over G with Acc(G) >= Acc(F) - eps.  Every
// enumerated pair is also checked against the disagreement-ratio DI bound;
// any pairwise breach turns the verdict to VIOLATION.
OracleResult max_di_change_exact(const EmpiricalDistribution& dist,
                                 const Classifier& f, const Rat& eps,
                                 int cap = 20);

// Analytic accuracy/disagreement of the budget-exhausting randomized
// achiever, asserted equal to (bayes accuracy - effective eps, bound).
OracleResult lemma1_expectation_check(const EmpiricalDistribution& dist,
                                      const Rat& eps);

// Random prediction-distribution scan: whenever the dominance checker
// accepts a pair of score laws, the positive-rate gap must be at least the
// mean gap (both in B-minus-A orientation).
struct DominanceScan {
    int trials = 0;
    int strict_cases = 0;
    int relaxed_cases = 0;
    int skipped = 0;     // neither condition held; inequality not asserted
    int violations = 0;
};
DominanceScan prop1_random_scan(int n_trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Named property suites (the CLI's oracle-verify surface)
// ---------------------------------------------------------------------------

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::vector<std::string> messages;  // one per failure, capped
    bool ok() const { return failures == 0; }
    void fail(const std::string& msg);
};

SuiteResult run_prop1_suite(int trials, std::uint64_t seed);
// corrupt_bound is a self-test hook: deliberately lowers the bound before
// comparison and therefore must produce failures.
SuiteResult run_prop2_suite(int instances, std::uint64_t seed,
                            bool corrupt_bound = false);
SuiteResult run_lemma1_suite(int instances, std::uint64_t seed);
SuiteResult run_prop3_suite(int instances, std::uint64_t seed);
SuiteResult run_prop4_suite(int instances, std::uint64_t seed);
SuiteResult run_prop5_suite(int instances, std::uint64_t seed);
SuiteResult run_prop6_suite(int instances, std::uint64_t seed);

}  // namespace fairmult
