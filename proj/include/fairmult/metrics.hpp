#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fairmult/empdist.hpp"
#include "fairmult/rational.hpp"

namespace fairmult {

// Per-point score f(x) in [0,1], aligned with the distribution's point order.
struct Predictor {
    std::vector<Rat> values;
};

// Per-point acceptance value.  Deterministic classifiers hold bits {0,1};
// randomized ones hold acceptance probabilities.  All metrics treat the
// values as expectations, so both kinds flow through the same formulas.
struct Classifier {
    enum class Kind { deterministic, randomized };
    std::vector<Rat> values;
    Kind kind = Kind::deterministic;

    static Classifier det(std::vector<int> bits);
    bool bit(std::size_t i) const { return values[i] != 0; }  // deterministic only
};

Classifier constant_classifier(std::size_t n, int value);
Classifier complement(const Classifier& f);

enum class Tie { one, zero };  // resolution for p(x) = 1/2 in the Bayes rule

// ---------------------------------------------------------------------------
// Core classifier metrics
// ---------------------------------------------------------------------------

// F(x) = 1 iff f(x) >= tau (threshold closed on the right); tau in (0,1).
Classifier threshold(const Predictor& pred, const Rat& tau);

Classifier bayes_classifier(const EmpiricalDistribution& dist, Tie tie = Tie::one);

// Probability of agreement with the label: sum mu(x)*[F*p + (1-F)*(1-p)].
Rat accuracy(const EmpiricalDistribution& dist, const Classifier& f);

// Expected disagreement mass: sum mu(x)*|F(x)-G(x)|.
Rat disagreement(const EmpiricalDistribution& dist, const Classifier& f,
                 const Classifier& g);

// P(F(X)=1 | X in g); error if the group has zero mass.
Rat positive_rate(const EmpiricalDistribution& dist, const Classifier& f, Group g);

// Signed disparate impact, rate(A) - rate(B); positive means A is favored.
Rat disparate_impact(const EmpiricalDistribution& dist, const Classifier& f);
Rat abs_disparate_impact(const EmpiricalDistribution& dist, const Classifier& f);

// Signed difference in base rates, base_rate(A) - base_rate(B).
Rat dbr(const EmpiricalDistribution& dist);

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

enum class CalibScope { global, per_group };

struct CalibrationViolation {
    CalibScope scope;
    std::optional<Group> group;  // set for per_group entries
    Rat score;                   // the predictor value v
    Rat deviation;               // signed: E[p | f=v] - v
};

struct CalibrationReport {
    std::vector<CalibrationViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Compares the mass-weighted mean of p(x) on each level set {f = v} against
// v, globally or within each group; reports deviations exceeding tol.
CalibrationReport check_calibration(const EmpiricalDistribution& dist,
                                    const Predictor& pred, CalibScope scope,
                                    const Rat& tol);

// ---------------------------------------------------------------------------
// Per-group prediction distributions and rate dominance
// ---------------------------------------------------------------------------

struct ScoreAtom {
    Rat score;
    Rat mass;  // conditional mass within the group
};

// The conditional laws of f(X) given the group; atoms sorted by score.
struct PredictionDistribution {
    std::vector<ScoreAtom> a;
    std::vector<ScoreAtom> b;

    const std::vector<ScoreAtom>& atoms(Group g) const {
        return g == Group::A ? a : b;
    }
    Rat mean(Group g) const;
    Rat positive_mass(Group g, const Rat& tau) const;  // mass at scores >= tau
};

PredictionDistribution prediction_distributions(const EmpiricalDistribution& dist,
                                                const Predictor& pred);

// Dominance of the two conditional score laws around the threshold:
//   strict  — A has at least as much mass at every score below tau, and B at
//             least as much at every score at/above tau;
//   relaxed — the same comparisons hold in aggregate, weighted by (1-v)
//             above tau and by v below tau.
// Either level forces positive_mass(B) - positive_mass(A) >= mean(B) - mean(A).
enum class RateDominance { strict_holds, relaxed_holds, neither };

RateDominance check_rate_dominance(const PredictionDistribution& pd, const Rat& tau);

// ---------------------------------------------------------------------------
// Ranking quality
// ---------------------------------------------------------------------------

// Probability that a random positive outscores a random negative, ties 0.5.
// Input: (score, label) pairs; needs at least one of each label.
double auroc(const std::vector<std::pair<double, int>>& scored);

}  // namespace fairmult
