#pragma once

#include <cstdint>

#include "fairmult/empdist.hpp"
#include "fairmult/metrics.hpp"
#include "fairmult/rng.hpp"

namespace fairmult {

// Random small instances for the property suites.  Masses are integer
// weights over a common denominator and label rates live on a coarse grid,
// so every downstream computation stays exact and fast.

// n_points in [2, max_points]; both groups guaranteed nonempty.
EmpiricalDistribution random_distribution(Rng& rng, int max_points,
                                          int rate_denom = 20);

// Uniformly random deterministic classifier on n points.
Classifier random_classifier(Rng& rng, std::size_t n);

// Paired instance for unawareness checks: points come in (A,B) sibling pairs
// (same latent features, possibly different label rates) plus optional
// singletons.  `unaware_f` is constant on each pair.
struct SiblingInstance {
    EmpiricalDistribution dist;
    Classifier unaware_f;
    std::vector<std::size_t> partner;  // partner index, or npos for singletons
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

SiblingInstance random_sibling_instance(Rng& rng, int max_pairs,
                                        int rate_denom = 20);

// Random per-group score laws on a closed [0,1] grid, for dominance tests.
PredictionDistribution random_prediction_distribution(Rng& rng, int max_atoms,
                                                      int score_denom = 20);

// Budget grid that exercises every linear piece of the bound: all level
// breakpoints, their midpoints, the full flip cost, and a beyond-total value.
std::vector<Rat> epsilon_grid(const struct RashomonProfile& profile);

}  // namespace fairmult
