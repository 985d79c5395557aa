#include "fairmult/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

#include "fairmult/instances.hpp"
#include "fairmult/logreg.hpp"
#include "fairmult/rashomon.hpp"
#include "fairmult/rng.hpp"

namespace fairmult {

namespace {

const Rat kHalf(1, 2);

void check_cap(const EmpiricalDistribution& dist, int cap) {
    if (static_cast<int>(dist.size()) > cap)
        throw std::invalid_argument(
            "instance has " + std::to_string(dist.size()) +
            " points, above the exhaustive-enumeration cap of " +
            std::to_string(cap) + "; use max_disagreement_sampled instead");
}

Classifier from_mask(const Classifier& base, std::uint64_t mask) {
    Classifier f = base;
    for (std::size_t i = 0; mask; ++i, mask >>= 1)
        if (mask & 1) f.values[i] = 1 - f.values[i];
    return f;
}

Verdict classify_exact(const Rat& exact, const Rat& bound) {
    if (exact > bound) return Verdict::violation;
    return exact == bound ? Verdict::tight : Verdict::sound_not_tight;
}

}  // namespace

void SuiteResult::fail(const std::string& msg) {
    ++failures;
    if (messages.size() < 10) messages.push_back(msg);
}

OracleResult max_disagreement_exact(const EmpiricalDistribution& dist,
                                    const Rat& eps, int cap) {
    check_cap(dist, cap);
    const RashomonProfile profile = build_profile(dist);
    const std::size_t n = dist.size();

    std::vector<Rat> flip_cost(n), mass(n);
    for (std::size_t i = 0; i < n; ++i) {
        mass[i] = dist[i].mass;
        flip_cost[i] = 2 * profile.point_margin[i] * dist[i].mass;
    }

    // Gray-code walk over all classifiers, tracked as flip masks against the
    // Bayes reference; one toggle per step keeps the running cost and
    // disagreement exact and cheap.
    Rat cost = 0, d = 0, best = 0;
    std::uint64_t mask = 0, best_mask = 0;
    const std::uint64_t count = std::uint64_t(1) << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const int bit = std::countr_zero(k);
        const std::uint64_t flag = std::uint64_t(1) << bit;
        mask ^= flag;
        if (mask & flag) {
            cost += flip_cost[bit];
            d += mass[bit];
        } else {
            cost -= flip_cost[bit];
            d -= mass[bit];
        }
        if (cost <= eps && d > best) {
            best = d;
            best_mask = mask;
        }
    }

    OracleResult res;
    res.quantity = "max_disagreement";
    res.exact_value = best;
    res.bound_value = multiplicity_bound(profile, eps).bound;
    res.witness = from_mask(profile.bayes, best_mask);
    res.verdict = classify_exact(res.exact_value, res.bound_value);
    return res;
}

OracleResult max_disagreement_sampled(const EmpiricalDistribution& dist,
                                      const Rat& eps, int trials,
                                      std::uint64_t seed) {
    const RashomonProfile profile = build_profile(dist);
    const Rat acc_floor = profile.bayes_accuracy - eps;
    Rng rng(seed);
    Rat best = 0;
    Classifier witness = profile.bayes;
    for (int t = 0; t < trials; ++t) {
        Classifier f = random_classifier(rng, dist.size());
        if (accuracy(dist, f) < acc_floor) continue;
        Rat d = disagreement(dist, f, profile.bayes);
        if (d > best) {
            best = d;
            witness = f;
        }
    }
    OracleResult res;
    res.quantity = "max_disagreement_sampled";
    res.exact_value = best;  // a lower bound on the true maximum
    res.bound_value = multiplicity_bound(profile, eps).bound;
    res.witness = witness;
    res.verdict = classify_exact(res.exact_value, res.bound_value);
    return res;
}

OracleResult max_di_change_exact(const EmpiricalDistribution& dist,
                                 const Classifier& f, const Rat& eps, int cap) {
    check_cap(dist, cap);
    if (f.kind != Classifier::Kind::deterministic)
        throw std::invalid_argument("enumeration needs a deterministic base model");
    const std::size_t n = dist.size();
    const Rat mass_a = dist.group_mass(Group::A);
    const Rat mass_b = dist.group_mass(Group::B);
    const Rat min_mass = std::min(mass_a, mass_b);
    if (min_mass == 0) throw std::invalid_argument("both groups need positive mass");

    // Per-point toggle deltas relative to F: accuracy, disagreement, DI.
    std::vector<Rat> d_acc(n), d_di(n), mass(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PointRecord& p = dist[i];
        const Rat dir = 1 - 2 * f.values[i];  // +1 when F says 0, -1 when F says 1
        mass[i] = p.mass;
        d_acc[i] = dir * p.mass * (2 * p.label_rate - 1);
        d_di[i] = dir * (p.group == Group::A ? Rat(p.mass / mass_a)
                                             : Rat(-p.mass / mass_b));
    }

    const Rat acc_f = accuracy(dist, f);
    Rat acc = acc_f, dd = 0, di_shift = 0;
    Rat best = 0, best_d = 0;
    std::uint64_t mask = 0, best_mask = 0;
    bool pairwise_breach = false;
    const std::uint64_t count = std::uint64_t(1) << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const int bit = std::countr_zero(k);
        const std::uint64_t flag = std::uint64_t(1) << bit;
        mask ^= flag;
        const int sign = (mask & flag) ? 1 : -1;
        acc += sign * d_acc[bit];
        dd += sign * mass[bit];
        di_shift += sign * d_di[bit];

        // Unconditional disagreement-ratio bound, checked on every pair.
        if (rat_abs(di_shift) * min_mass > dd) pairwise_breach = true;

        if (acc >= acc_f - eps && rat_abs(di_shift) > best) {
            best = rat_abs(di_shift);
            best_d = dd;
            best_mask = mask;
        }
    }

    OracleResult res;
    res.quantity = "max_di_change";
    res.exact_value = best;
    res.bound_value = best_d / min_mass;
    res.witness = from_mask(f, best_mask);
    res.verdict = pairwise_breach ? Verdict::violation
                                  : classify_exact(res.exact_value, res.bound_value);
    return res;
}

OracleResult lemma1_expectation_check(const EmpiricalDistribution& dist,
                                      const Rat& eps) {
    const RashomonProfile profile = build_profile(dist);
    const BoundCertificate cert = multiplicity_bound(profile, eps);
    const Rat acc = accuracy(dist, cert.achiever);
    const Rat d = disagreement(dist, cert.achiever, profile.bayes);

    OracleResult res;
    res.quantity = "lemma1_expectation";
    res.exact_value = d;
    res.bound_value = cert.bound;
    res.witness = cert.achiever;
    const bool acc_ok = acc == profile.bayes_accuracy - cert.effective_epsilon;
    res.verdict = (acc_ok && d == cert.bound) ? Verdict::tight : Verdict::violation;
    return res;
}

DominanceScan prop1_random_scan(int n_trials, std::uint64_t seed) {
    if (n_trials < 1) throw std::invalid_argument("need at least one trial");
    Rng rng(seed);
    DominanceScan scan;
    scan.trials = n_trials;
    for (int t = 0; t < n_trials; ++t) {
        const PredictionDistribution pd = random_prediction_distribution(rng, 4);
        const RateDominance dom = check_rate_dominance(pd, kHalf);
        if (dom == RateDominance::neither) {
            ++scan.skipped;
            continue;
        }
        (dom == RateDominance::strict_holds ? scan.strict_cases
                                            : scan.relaxed_cases) += 1;
        const Rat rate_gap = pd.positive_mass(Group::B, kHalf) -
                             pd.positive_mass(Group::A, kHalf);
        const Rat mean_gap = pd.mean(Group::B) - pd.mean(Group::A);
        if (rate_gap < mean_gap) ++scan.violations;
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

SuiteResult run_prop1_suite(int trials, std::uint64_t seed) {
    SuiteResult suite;
    suite.name = "prop1";
    const DominanceScan scan = prop1_random_scan(trials, seed);
    suite.cases = scan.strict_cases + scan.relaxed_cases;
    if (scan.violations > 0)
        suite.fail("rate/mean gap inequality violated in " +
                   std::to_string(scan.violations) + " of " +
                   std::to_string(suite.cases) + " accepted trials");
    if (suite.cases == 0) suite.fail("dominance filter accepted no trials");
    return suite;
}

SuiteResult run_prop2_suite(int instances, std::uint64_t seed, bool corrupt_bound) {
    SuiteResult suite;
    suite.name = "prop2";
    Rng rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const EmpiricalDistribution dist = random_distribution(rng, 10);
        const RashomonProfile profile = build_profile(dist);
        const bool check_permutation = inst % 25 == 0;
        for (const Rat& eps : epsilon_grid(profile)) {
            ++suite.cases;
            const OracleResult res = max_disagreement_exact(dist, eps);
            if (corrupt_bound) {
                const Rat bad = res.bound_value * rat_frac(9, 10) - rat_frac(1, 1000);
                if (res.exact_value > bad)
                    suite.fail("corrupted bound breached at eps=" +
                               rat_to_string(eps));
                continue;
            }
            if (res.verdict == Verdict::violation)
                suite.fail("bound violated: exact " +
                           rat_to_string(res.exact_value) + " > bound " +
                           rat_to_string(res.bound_value) + " at eps=" +
                           rat_to_string(eps));
            // At the exact breakpoints the budget is spent with no remainder,
            // so the deterministic maximum must meet the bound.
            bool breakpoint = eps == profile.total_flip_cost;
            for (const ProfileLevel& lvl : profile.levels)
                breakpoint = breakpoint || eps == lvl.flip_cost_below;
            if (breakpoint && res.verdict != Verdict::tight)
                suite.fail("deterministic maximum misses the bound at breakpoint eps=" +
                           rat_to_string(eps));
            // Coarse-bound dominance whenever it applies.
            if (profile.levels.front().margin > 0 &&
                legacy_bound(profile, eps) < res.bound_value)
                suite.fail("legacy bound fell below the tight bound at eps=" +
                           rat_to_string(eps));
            if (check_permutation) {
                std::vector<PointRecord> rev(dist.points().rbegin(),
                                             dist.points().rend());
                const OracleResult res2 = max_disagreement_exact(
                    EmpiricalDistribution(std::move(rev)), eps);
                if (res2.exact_value != res.exact_value)
                    suite.fail("enumeration depends on point order at eps=" +
                               rat_to_string(eps));
            }
        }
    }
    return suite;
}

SuiteResult run_lemma1_suite(int instances, std::uint64_t seed) {
    SuiteResult suite;
    suite.name = "lemma1";
    Rng rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const EmpiricalDistribution dist = random_distribution(rng, 12);
        const RashomonProfile profile = build_profile(dist);
        for (const Rat& eps : epsilon_grid(profile)) {
            ++suite.cases;
            const OracleResult res = lemma1_expectation_check(dist, eps);
            if (res.verdict != Verdict::tight)
                suite.fail("achiever equalities failed at eps=" +
                           rat_to_string(eps));
        }
    }
    return suite;
}

SuiteResult run_prop3_suite(int instances, std::uint64_t seed) {
    SuiteResult suite;
    suite.name = "prop3";
    Rng rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const EmpiricalDistribution dist = random_distribution(rng, 8);
        const RashomonProfile profile = build_profile(dist);
        const std::size_t n = dist.size();
        const std::uint64_t count = std::uint64_t(1) << n;

        // Subset sums: flip cost and disagreement mass per mask against Bayes.
        std::vector<Rat> cost(count), weight(count);
        for (std::uint64_t m = 1; m < count; ++m) {
            const int bit = std::countr_zero(m);
            const std::uint64_t rest = m & (m - 1);
            cost[m] = cost[rest] +
                      2 * profile.point_margin[bit] * dist[bit].mass;
            weight[m] = weight[rest] + dist[bit].mass;
        }

        const std::vector<Rat> grid = epsilon_grid(profile);
        for (int pick = 0; pick < 3; ++pick) {
            const Rat eps = grid[rng.uniform_below(grid.size())];
            const Rat delta = grid[rng.uniform_below(grid.size())];
            const Rat bound = two_model_bound(profile, eps, delta);
            ++suite.cases;
            bool breached = false;
            for (std::uint64_t m1 = 0; m1 < count && !breached; ++m1) {
                if (cost[m1] > eps) continue;
                for (std::uint64_t m2 = 0; m2 < count; ++m2) {
                    if (cost[m2] > delta) continue;
                    if (weight[m1 ^ m2] > bound) {
                        breached = true;
                        break;
                    }
                }
            }
            if (breached)
                suite.fail("pair disagreement exceeds the two-model bound at eps=" +
                           rat_to_string(eps) + " delta=" + rat_to_string(delta));
        }

        // Cross-check a few masks through the metrics code path.
        for (int t = 0; t < 10; ++t) {
            const std::uint64_t m1 = rng.uniform_below(count);
            const std::uint64_t m2 = rng.uniform_below(count);
            const Classifier f = from_mask(profile.bayes, m1);
            const Classifier g = from_mask(profile.bayes, m2);
            if (accuracy(dist, f) != profile.bayes_accuracy - cost[m1] ||
                disagreement(dist, f, g) != weight[m1 ^ m2]) {
                suite.fail("mask bookkeeping disagrees with the metrics module");
                break;
            }
        }
    }
    return suite;
}

SuiteResult run_prop4_suite(int instances, std::uint64_t seed) {
    SuiteResult suite;
    suite.name = "prop4";
    Rng rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const EmpiricalDistribution dist = random_distribution(rng, 8);
        const std::size_t n = dist.size();
        const std::uint64_t count = std::uint64_t(1) << n;
        const Rat mass_a = dist.group_mass(Group::A);
        const Rat mass_b = dist.group_mass(Group::B);
        const Rat min_mass = std::min(mass_a, mass_b);

        // For a fixed difference mask, the largest |DI(F)-DI(G)| over all
        // base classifiers is the sum of per-point DI swings; comparing that
        // against the mask's disagreement mass covers every pair at once.
        std::vector<Rat> swing(count), weight(count);
        for (std::uint64_t m = 1; m < count; ++m) {
            const int bit = std::countr_zero(m);
            const std::uint64_t rest = m & (m - 1);
            const PointRecord& p = dist[bit];
            swing[m] = swing[rest] +
                       p.mass / (p.group == Group::A ? mass_a : mass_b);
            weight[m] = weight[rest] + p.mass;
        }
        ++suite.cases;
        for (std::uint64_t m = 0; m < count; ++m) {
            if (swing[m] * min_mass > weight[m]) {
                suite.fail("DI swing exceeds the disagreement-ratio bound");
                break;
            }
        }

        // Spot-check real classifier pairs end to end.
        for (int t = 0; t < 50; ++t) {
            const Classifier f = random_classifier(rng, n);
            const Classifier g = random_classifier(rng, n);
            const Rat lhs =
                rat_abs(disparate_impact(dist, f) - disparate_impact(dist, g));
            if (lhs > di_difference_bound(dist, f, g)) {
                suite.fail("classifier pair violates the DI difference bound");
                break;
            }
        }
    }
    return suite;
}

SuiteResult run_prop5_suite(int instances, std::uint64_t seed) {
    SuiteResult suite;
    suite.name = "prop5";
    Rng rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const SiblingInstance sib = random_sibling_instance(rng, 3);
        const EmpiricalDistribution& dist = sib.dist;
        const RashomonProfile profile = build_profile(dist);
        const Rat acc_f = accuracy(dist, sib.unaware_f);
        const Rat di_f = disparate_impact(dist, sib.unaware_f);
        const Rat max_mass =
            std::max(dist.group_mass(Group::A), dist.group_mass(Group::B));

        for (const Rat& eps : epsilon_grid(profile)) {
            if (eps <= 0) continue;
            ++suite.cases;
            const UnawareDiCertificate cert =
                unaware_achievable_di(dist, sib.unaware_f, eps);
            const Rat acc_g = accuracy(dist, cert.g);
            const Rat di_g = disparate_impact(dist, cert.g);
            if (acc_g < acc_f - eps)
                suite.fail("constructed model left the accuracy ball at eps=" +
                           rat_to_string(eps));
            if (rat_abs(di_f - di_g) != cert.di_change_abs)
                suite.fail("certificate DI change does not match recomputation");
            if (cert.di_change_abs < cert.lower_bound)
                suite.fail("DI change below the advertised floor at eps=" +
                           rat_to_string(eps));
            const Rat lb_check = disagreement(dist, cert.h, profile.bayes) /
                                 (2 * max_mass);
            if (cert.lower_bound != lb_check)
                suite.fail("certificate floor does not match its reference model");
            const OracleResult best = max_di_change_exact(dist, sib.unaware_f, eps);
            if (best.verdict == Verdict::violation)
                suite.fail("pairwise DI bound breached during enumeration");
            if (best.exact_value < cert.di_change_abs)
                suite.fail("construction exceeds the exhaustive maximum (bug)");
        }
    }
    return suite;
}

SuiteResult run_prop6_suite(int instances, std::uint64_t seed) {
    SuiteResult suite;
    suite.name = "prop6";
    Rng rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        // Hand-set aware model over a small integer feature grid.
        const int nf = static_cast<int>(rng.uniform_int(1, 2));
        LRModel model;
        for (int j = 0; j < nf; ++j) {
            model.feature_names.push_back("f" + std::to_string(j + 1));
            model.coefficients.push_back(rng.normal(0.0, 1.0));
        }
        model.feature_names.push_back("pa");
        const bool zero_cg = inst % 10 == 9;
        const double c_g =
            zero_cg ? 0.0 : -0.05 - std::fabs(rng.normal(0.0, 1.0));
        model.coefficients.push_back(c_g);
        model.pa_index = model.coefficients.size() - 1;
        model.std_intercept = model.intercept = rng.normal(0.0, 0.5);
        model.std_coefficients = model.coefficients;

        RowDataset data;
        data.feature_names = std::vector<std::string>(
            model.feature_names.begin(), model.feature_names.end() - 1);
        const int rows = static_cast<int>(rng.uniform_int(40, 160));
        for (int r = 0; r < rows; ++r) {
            std::vector<double> feats;
            for (int j = 0; j < nf; ++j)
                feats.push_back(static_cast<double>(rng.uniform_int(-2, 2)));
            data.features.push_back(std::move(feats));
            data.group.push_back(rng.bernoulli(0.5) ? Group::B : Group::A);
            data.label.push_back(rng.bernoulli(0.5) ? 1 : 0);
        }
        // Both groups must appear for DI to exist.
        data.group[0] = Group::A;
        data.group[1] = Group::B;

        const Aggregation agg = aggregate_rows(data);
        const ZeroPaReport rep = analyze_zero_pa(agg, model);
        const Classifier f = classify(model, agg);
        const Classifier fprime = classify(zero_pa(model), agg);
        ++suite.cases;

        std::vector<std::size_t> flips;
        for (std::size_t i = 0; i < agg.dist.size(); ++i)
            if (f.values[i] != fprime.values[i]) flips.push_back(i);
        if (flips != rep.q_points) {
            suite.fail("flip set differs from the reported Q region");
            continue;
        }
        for (std::size_t i : flips)
            if (agg.dist[i].group != Group::B || f.values[i] != 0)
                suite.fail("flip outside group B or in the wrong direction");

        if (rep.di_fprime != rep.di_f - rep.predicted_di_drop)
            suite.fail("signed DI identity failed");
        const Rat acc_change = rat_abs(rep.acc_fprime - rep.acc_f);
        if (acc_change > rep.acc_bound)
            suite.fail("accuracy change exceeds the stated bound");
        if (acc_change > rep.p_q)
            suite.fail("accuracy change exceeds the flip mass");
        if (zero_cg && !flips.empty())
            suite.fail("zero PA coefficient still changed classifications");
    }
    return suite;
}

}  // namespace fairmult
