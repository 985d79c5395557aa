#include "fairmult/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "fairmult/errors.hpp"
#include "fairmult/logreg.hpp"
#include "fairmult/rng.hpp"

namespace fairmult {

namespace {

struct FeatureSpec {
    std::string name;
    std::vector<int> values;
    std::vector<int> weights;  // pmf weights, not normalized
    double coef;               // ground-truth coefficient per raw unit
};

struct ProfileSpec {
    std::vector<FeatureSpec> features;
    double intercept;
    double default_b_frac;
};

std::vector<int> iota_values(int lo, int hi, int step = 1) {
    std::vector<int> v;
    for (int x = lo; x <= hi; x += step) v.push_back(x);
    return v;
}

ProfileSpec profile_spec(SynthProfile p) {
    switch (p) {
        case SynthProfile::income_like: {
            // Education dominates the logit (step 1.1); age and hours only
            // smear each education level into a narrow cluster (width
            // ~0.077).  With this intercept the education-8 cluster spans
            // [0.08, 0.157], so it is the entire logit window [0, 0.86)
            // and carries exactly 23/160 = 0.14375 of the mass; the
            // neighbouring clusters sit at -0.94 and +1.18.
            ProfileSpec s;
            s.features.push_back(FeatureSpec{
                "education", iota_values(1, 16),
                {2, 3, 5, 8, 12, 16, 20, 23, 21, 17, 12, 9, 6, 3, 2, 1},
                1.1});
            s.features.push_back(FeatureSpec{
                "age", iota_values(18, 70, 2),
                std::vector<int>(27, 1), 0.001});
            s.features.push_back(FeatureSpec{
                "hours", {10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60},
                {1, 1, 2, 2, 3, 4, 10, 5, 3, 2, 1}, 0.0005});
            s.intercept = -8.743;
            s.default_b_frac = 0.48;
            return s;
        }
        case SynthProfile::employment_like: {
            ProfileSpec s;
            std::vector<int> edu_w;
            for (int v = 0; v <= 20; ++v) edu_w.push_back(21 - std::abs(v - 12));
            s.features.push_back(
                FeatureSpec{"education", iota_values(0, 20), edu_w, 0.28});
            s.features.push_back(FeatureSpec{"experience", iota_values(0, 30),
                                             std::vector<int>(31, 1), 0.05});
            s.intercept = -4.1;
            s.default_b_frac = 0.5;
            return s;
        }
        case SynthProfile::almp_like: {
            ProfileSpec s;
            std::vector<int> months_w;
            for (int v = 0; v <= 24; ++v) months_w.push_back(25 - v);
            s.features.push_back(FeatureSpec{"months_unemployed",
                                             iota_values(0, 24), months_w, -0.13});
            s.features.push_back(FeatureSpec{"prior_jobs", iota_values(0, 8),
                                             std::vector<int>(9, 1), 0.12});
            s.features.push_back(FeatureSpec{"age", iota_values(20, 60, 5),
                                             std::vector<int>(9, 1), -0.01});
            s.intercept = 1.6;
            s.default_b_frac = 0.5;
            return s;
        }
    }
    throw std::invalid_argument("unknown profile");
}

// Walk the full product of feature supports with exact probabilities.
template <typename Fn>
void enumerate_design(const ProfileSpec& spec, Fn&& fn) {
    std::vector<std::size_t> idx(spec.features.size(), 0);
    std::vector<double> inv_total;
    for (const FeatureSpec& f : spec.features)
        inv_total.push_back(
            1.0 / std::accumulate(f.weights.begin(), f.weights.end(), 0.0));
    for (;;) {
        double prob = 1.0, z = spec.intercept;
        for (std::size_t j = 0; j < spec.features.size(); ++j) {
            const FeatureSpec& f = spec.features[j];
            prob *= f.weights[idx[j]] * inv_total[j];
            z += f.coef * f.values[idx[j]];
        }
        fn(z, prob);
        std::size_t j = 0;
        for (; j < idx.size(); ++j) {
            if (++idx[j] < spec.features[j].values.size()) break;
            idx[j] = 0;
        }
        if (j == idx.size()) break;
    }
}

double design_rate(const ProfileSpec& spec, double offset) {
    double rate = 0.0;
    enumerate_design(spec, [&](double z, double prob) {
        rate += prob * sigmoid(z + offset);
    });
    return rate;
}

// Offset for a requested base-rate gap rate(A) - rate(B); the gap is
// decreasing in the offset, so plain bisection.
double solve_offset(const ProfileSpec& spec, double dbr_target) {
    const double rate_a = design_rate(spec, 0.0);
    double lo = -12.0, hi = 12.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gap = rate_a - design_rate(spec, mid);
        if (gap > dbr_target)
            lo = mid;  // offset too negative-side? gap too big -> raise offset
        else
            hi = mid;
        if (hi - lo < 1e-12) break;
    }
    const double offset = 0.5 * (lo + hi);
    // Bisection clamps at the bracket edge when the target is out of range;
    // that silent near-miss must be an error, not data with the wrong gap.
    if (std::abs((rate_a - design_rate(spec, offset)) - dbr_target) > 1e-6)
        throw DataError("base-rate gap " + std::to_string(dbr_target) +
                        " is not reachable for this profile");
    return offset;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SynthProfile parse_profile(const std::string& name) {
    if (name == "income-like") return SynthProfile::income_like;
    if (name == "employment-like") return SynthProfile::employment_like;
    if (name == "almp-like") return SynthProfile::almp_like;
    throw DataError("unknown profile '" + name +
                    "' (expected income-like, employment-like, almp-like)");
}

const char* profile_name(SynthProfile p) {
    switch (p) {
        case SynthProfile::income_like: return "income-like";
        case SynthProfile::employment_like: return "employment-like";
        default: return "almp-like";
    }
}

SynthResult generate_synthetic(const SynthConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("need n >= 1");
    const ProfileSpec spec = profile_spec(cfg.profile);
    const double b_frac =
        cfg.group_b_frac >= 0 ? cfg.group_b_frac : spec.default_b_frac;
    if (b_frac < 0.0 || b_frac > 1.0)
        throw std::invalid_argument("group-B fraction outside [0,1]");

    SynthResult out;
    out.group_offset_used =
        cfg.dbr_target ? solve_offset(spec, *cfg.dbr_target) : cfg.group_offset;
    out.design_rate_a = design_rate(spec, 0.0);
    out.design_rate_b = design_rate(spec, out.group_offset_used);

    // Sampling tables.
    std::vector<std::vector<long>> cum(spec.features.size());
    std::vector<long> totals(spec.features.size());
    for (std::size_t j = 0; j < spec.features.size(); ++j) {
        long run = 0;
        for (int w : spec.features[j].weights) {
            run += w;
            cum[j].push_back(run);
        }
        totals[j] = run;
        out.data.feature_names.push_back(spec.features[j].name);
    }

    Rng rng(cfg.seed);
    out.data.features.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const Group g = rng.bernoulli(b_frac) ? Group::B : Group::A;
        std::vector<double> feats(spec.features.size());
        double z = spec.intercept;
        for (std::size_t j = 0; j < spec.features.size(); ++j) {
            const long r = static_cast<long>(
                rng.uniform_below(static_cast<std::uint64_t>(totals[j])));
            const std::size_t k = static_cast<std::size_t>(
                std::lower_bound(cum[j].begin(), cum[j].end(), r + 1) -
                cum[j].begin());
            feats[j] = spec.features[j].values[k];
            z += spec.features[j].coef * feats[j];
        }
        if (g == Group::B) z += out.group_offset_used;
        out.data.features.push_back(std::move(feats));
        out.data.group.push_back(g);
        out.data.label.push_back(rng.bernoulli(sigmoid(z)) ? 1 : 0);
    }

    out.params = {
        {"profile", profile_name(cfg.profile)},
        {"n", std::to_string(cfg.n)},
        {"seed", std::to_string(cfg.seed)},
        {"group_offset", fmt(out.group_offset_used)},
        {"group_b_frac", fmt(b_frac)},
        {"intercept", fmt(spec.intercept)},
    };
    for (const FeatureSpec& f : spec.features)
        out.params.emplace_back("coef_" + f.name, fmt(f.coef));
    out.params.emplace_back("design_rate_a", fmt(out.design_rate_a));
    out.params.emplace_back("design_rate_b", fmt(out.design_rate_b));
    return out;
}

CsvTable synth_to_csv(const SynthResult& result) {
    CsvTable table;
    for (const auto& [k, v] : result.params)
        table.comments.push_back(" " + k + "=" + v);
    table.header = result.data.feature_names;
    table.header.push_back("group");
    table.header.push_back("label");
    for (std::size_t i = 0; i < result.data.n_rows(); ++i) {
        std::vector<std::string> row;
        for (double v : result.data.features[i])
            row.push_back(std::to_string(static_cast<long>(v)));
        row.push_back(group_name(result.data.group[i]));
        row.push_back(result.data.label[i] ? "1" : "0");
        table.rows.push_back(std::move(row));
    }
    return table;
}

double design_window_mass(SynthProfile profile, double lo, double hi) {
    const ProfileSpec spec = profile_spec(profile);
    double mass = 0.0;
    enumerate_design(spec, [&](double z, double prob) {
        if (z >= lo && z < hi) mass += prob;
    });
    return mass;
}

}  // namespace fairmult
