#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairmult/csvio.hpp"
#include "fairmult/empdist.hpp"

namespace fairmult {

// Synthetic tabular generators: discrete feature distributions (identical
// across groups) and Bernoulli labels from a logistic ground truth with an
// additive group-B logit offset.  Because the feature law is finite and
// known, expected rates and window masses are computable exactly by
// enumeration — the generator doubles as its own oracle.

enum class SynthProfile { income_like, employment_like, almp_like };

SynthProfile parse_profile(const std::string& name);
const char* profile_name(SynthProfile p);

struct SynthConfig {
    SynthProfile profile = SynthProfile::income_like;
    std::size_t n = 10000;
    double group_offset = 0.0;         // added to group-B logits
    std::optional<double> dbr_target;  // solve for the offset instead
    double group_b_frac = -1.0;        // < 0: profile default
    std::uint64_t seed = 1;
};

struct SynthResult {
    RowDataset data;
    double group_offset_used = 0.0;
    double design_rate_a = 0.0;  // exact E[sigma(z)] for group A
    double design_rate_b = 0.0;
    std::vector<std::pair<std::string, std::string>> params;  // header comments
};

SynthResult generate_synthetic(const SynthConfig& cfg);

// Dataset as CSV with "# key=value" parameter comments.
CsvTable synth_to_csv(const SynthResult& result);

// Exact mass of feature vectors whose no-offset ground-truth logit falls in
// [lo, hi) — the design-level size of the coefficient-zeroing flip window.
double design_window_mass(SynthProfile profile, double lo, double hi);

}  // namespace fairmult
