#pragma once

// Shared hand-computed fixtures.  The four-point reference distribution is
// used across the metrics / rashomon / oracle tests; all its derived
// quantities (base rates, margins, bounds) are exact rationals worked out by
// hand and frozen here.

#include <utility>
#include <vector>

#include "fairmult/empdist.hpp"
#include "fairmult/rational.hpp"

namespace fairtest {

using fairmult::EmpiricalDistribution;
using fairmult::Group;
using fairmult::PointRecord;
using fairmult::Rat;
using fairmult::rat_frac;

// Four equal-mass points, label rates (2/5, 2/5, 11/20, 7/10); the first two
// form group B, the last two group A.  Margins are (1/10, 1/10, 1/20, 1/5).
inline EmpiricalDistribution example_dist() {
    std::vector<PointRecord> pts{
        {"x1", rat_frac(1, 4), rat_frac(2, 5), Group::B},
        {"x2", rat_frac(1, 4), rat_frac(2, 5), Group::B},
        {"x3", rat_frac(1, 4), rat_frac(11, 20), Group::A},
        {"x4", rat_frac(1, 4), rat_frac(7, 10), Group::A},
    };
    return EmpiricalDistribution(std::move(pts));
}

// Same points with the group tags swapped (A is now the low-rate side).
inline EmpiricalDistribution example_dist_swapped() {
    std::vector<PointRecord> pts{
        {"x1", rat_frac(1, 4), rat_frac(2, 5), Group::A},
        {"x2", rat_frac(1, 4), rat_frac(2, 5), Group::A},
        {"x3", rat_frac(1, 4), rat_frac(11, 20), Group::B},
        {"x4", rat_frac(1, 4), rat_frac(7, 10), Group::B},
    };
    return EmpiricalDistribution(std::move(pts));
}

}  // namespace fairtest
