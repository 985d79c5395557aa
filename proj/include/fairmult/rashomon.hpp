#pragma once

#include <memory>
#include <vector>

#include "fairmult/empdist.hpp"
#include "fairmult/metrics.hpp"
#include "fairmult/rational.hpp"

namespace fairmult {

// ---------------------------------------------------------------------------
// Multiplicity profile
//
// Group the points by their margin |p(x) - 1/2|.  Flipping the reference
// (Bayes) decision on a point costs 2*margin*mass of accuracy, so the
// cheapest way to buy disagreement is to flip small-margin points first.
// flip_cost_below(level) is the accuracy spent flipping every strictly
// smaller level in full; it is the exact breakpoint grid of the bound.
// ---------------------------------------------------------------------------

struct ProfileLevel {
    Rat margin;                       // |p - 1/2|, distinct per level
    Rat mass;                         // total mass at this margin
    Rat flip_cost_below;              // accuracy cost of flipping all smaller levels
    std::vector<std::size_t> points;  // distribution indices at this margin
};

struct RashomonProfile {
    std::shared_ptr<const EmpiricalDistribution> dist;
    std::vector<ProfileLevel> levels;  // ascending margin
    std::vector<Rat> point_margin;     // per point
    Classifier bayes;                  // reference classifier (ties -> 1)
    Rat bayes_accuracy;
    Rat total_flip_cost;               // accuracy cost of flipping every point

    std::size_t n_points() const { return point_margin.size(); }
};

RashomonProfile build_profile(const EmpiricalDistribution& dist);
RashomonProfile build_profile(std::shared_ptr<const EmpiricalDistribution> dist);

// Largest margin level whose flip_cost_below fits the accuracy budget.
Rat margin_at_budget(const RashomonProfile& profile, const Rat& eps);

// ---------------------------------------------------------------------------
// The tight disagreement bound and its achiever
// ---------------------------------------------------------------------------

// Certificate for: max { d(F, Bayes) : Acc(F) >= Acc(Bayes) - eps }.
// The achiever flips every level below `margin` surely and the level at
// `margin` with just enough probability to spend the whole budget; its
// accuracy and disagreement are recomputed through the metrics module at
// construction and must match `bayes_accuracy - effective_epsilon` and
// `bound` exactly.
struct BoundCertificate {
    Rat epsilon;            // requested budget
    Rat effective_epsilon;  // min(epsilon, total_flip_cost) — the spendable part
    Rat margin;             // margin_at_budget(effective_epsilon)
    Rat bound;              // max achievable disagreement with the reference
    Classifier achiever;
    Rat achieved_accuracy;
    Rat achieved_disagreement;
};

BoundCertificate multiplicity_bound(const RashomonProfile& profile, const Rat& eps);

// eps / (2 * min margin): the coarse bound that treats every point as if it
// sat at the smallest margin.  Requires min margin > 0; never smaller than
// multiplicity_bound.
Rat legacy_bound(const RashomonProfile& profile, const Rat& eps);

// Bound on d(F,G) for two classifiers within eps and delta of the reference
// accuracy: both live inside the (eps+delta)-ball around Bayes.
Rat two_model_bound(const RashomonProfile& profile, const Rat& eps, const Rat& delta);

// |DI(F) - DI(G)| <= d(F,G) / min group mass (raw, not range-clipped).
Rat di_difference_bound(const EmpiricalDistribution& dist, const Classifier& f,
                        const Classifier& g);

// ---------------------------------------------------------------------------
// Achievable DI movement for an unaware model
// ---------------------------------------------------------------------------

// Certificate for the construction that moves DI while staying accuracy-close
// to F: derandomize a near-optimal reference H, take its disagreement set
// with Bayes, and push A-side decisions up / B-side down (or the mirror).
struct UnawareDiCertificate {
    Classifier g;        // the returned model, within eps accuracy of F
    Rat di_f;            // signed DI of F
    Rat di_g;            // signed DI of g
    Rat di_change_abs;   // |di_f - di_g|
    Classifier h;        // deterministic near-optimal reference used
    Rat d_h_bayes;       // disagreement(h, Bayes)
    Rat lower_bound;     // d_h_bayes / (2 * max group mass) — guaranteed <= di_change_abs
    Rat budget_used;     // accuracy budget H was built with
    bool fallback;       // true if the conservative budget was needed
};

// F is expected to be unaware (constant across points that differ only in
// group); with opaque point ids that is the caller's contract, not checked
// here.  eps must be positive.
UnawareDiCertificate unaware_achievable_di(const EmpiricalDistribution& dist,
                                           const Classifier& f, const Rat& eps);

}  // namespace fairmult
