// Acceptance gate: one pass/fail line per shipped guarantee, each with a
// wall-clock budget.  Exit status is the number of failed criteria, so the
// harness treats any red line as a failure.
//
// Tolerances are pinned here, next to the checks that use them; loosening
// one is a visible diff.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fairmult/audit.hpp"
#include "fairmult/instances.hpp"
#include "fairmult/logreg.hpp"
#include "fairmult/metrics.hpp"
#include "fairmult/oracle.hpp"
#include "fairmult/policy.hpp"
#include "fairmult/rashomon.hpp"
#include "fairmult/rng.hpp"
#include "fairmult/synth.hpp"
#include "../tests/fixtures.hpp"

using namespace fairmult;
using fairtest::example_dist;

namespace {

// ---- pinned tolerances ----------------------------------------------------
constexpr double kGradTol = 1e-5;         // analytic vs central difference
constexpr double kCoefTol = 0.1;          // planted-coefficient recovery
constexpr double kDropCenter = 0.145;     // flagship predicted DI drop
constexpr double kDropTol = 0.01;
constexpr double kPqCenter = 0.069;       // flagship flip-window mass
constexpr double kPqTol = 0.007;
constexpr double kDiReductionMin = 0.15;  // per-split |DI| reduction
constexpr double kAccReductionMax = 0.01; // per-split relative accuracy cost

// ---- flagship fixtures, built once on first use ---------------------------

const AuditReport& flagship_audit() {
    static const AuditReport rep = [] {
        SynthConfig scfg;
        scfg.profile = SynthProfile::income_like;
        scfg.n = 200000;
        scfg.group_offset = -0.86;
        scfg.seed = 11;
        AuditConfig acfg;
        acfg.protocol.splits = 10;
        acfg.protocol.seed = 5;
        return run_audit_lr(generate_synthetic(scfg).data, acfg);
    }();
    return rep;
}

struct Check {
    std::ostringstream out;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            out << (out.tellp() > 0 ? "; " : "") << what;
        }
    }
};

// ---- criteria -------------------------------------------------------------

void c01_reference_fixture(Check& c) {
    const EmpiricalDistribution d = example_dist();
    c.expect(d.base_rate() == rat_frac(41, 80), "base rate");
    c.expect(d.base_rate(Group::A) == rat_frac(5, 8), "base rate A");
    c.expect(d.base_rate(Group::B) == rat_frac(2, 5), "base rate B");
    c.expect(dbr(d) == rat_frac(9, 40), "base-rate gap");

    const Classifier bayes = bayes_classifier(d);
    c.expect(accuracy(d, bayes) == rat_frac(49, 80), "reference accuracy");
    c.expect(disparate_impact(d, bayes) == 1, "reference DI");

    // the three calibrated predictors and their thresholded classifiers
    const Predictor f1{{rat_frac(9, 20), rat_frac(9, 20), rat_frac(9, 20),
                        rat_frac(7, 10)}};
    const Predictor f2{{rat_frac(19, 40), rat_frac(11, 20), rat_frac(19, 40),
                        rat_frac(11, 20)}};
    const Predictor f3{{rat_frac(41, 80), rat_frac(41, 80), rat_frac(41, 80),
                        rat_frac(41, 80)}};
    for (const Predictor& f : {f1, f2, f3})
        c.expect(check_calibration(d, f, CalibScope::global, Rat(0)).ok(),
                 "global calibration");
    c.expect(
        check_calibration(d, f3, CalibScope::per_group, Rat(0)).violations.size() ==
            2,
        "per-group calibration violations");

    const Rat half = rat_frac(1, 2);
    c.expect(threshold(f1, half).values == Classifier::det({0, 0, 0, 1}).values,
             "threshold f1");
    c.expect(threshold(f2, half).values == Classifier::det({0, 1, 0, 1}).values,
             "threshold f2");
    c.expect(threshold(f3, half).values == Classifier::det({1, 1, 1, 1}).values,
             "threshold f3");
    c.expect(disparate_impact(d, threshold(f1, half)) == rat_frac(1, 2),
             "DI of thresholded f1");
    c.expect(disparate_impact(d, threshold(f2, half)) == 0,
             "DI of thresholded f2");
    c.expect(accuracy(d, threshold(f3, half)) == d.base_rate(),
             "accuracy of accept-all");
}

void c02_bound_table(Check& c) {
    const RashomonProfile prof = build_profile(example_dist());
    const std::vector<std::pair<Rat, Rat>> table{
        {rat_frac(1, 40), rat_frac(1, 4)},
        {rat_frac(3, 40), rat_frac(1, 2)},
        {rat_frac(1, 8), rat_frac(3, 4)},
    };
    for (const auto& [eps, want] : table) {
        const BoundCertificate cert = multiplicity_bound(prof, eps);
        c.expect(cert.bound == want, "bound at " + rat_to_string(eps));
        const OracleResult r = max_disagreement_exact(*prof.dist, eps);
        c.expect(r.exact_value == want,
                 "exhaustive maximum at " + rat_to_string(eps));
        c.expect(r.verdict == Verdict::tight,
                 "tightness at " + rat_to_string(eps));
    }
}

void c03_soundness_scan(Check& c) {
    // cases = (instance, budget) pairs; every instance contributes its grid
    const SuiteResult r = run_prop2_suite(1000, 2024);
    c.expect(r.cases >= 1000, "case count " + std::to_string(r.cases));
    c.expect(r.failures == 0,
             "violations: " + std::to_string(r.failures));
}

void c04_achiever_expectations(Check& c) {
    const SuiteResult r = run_lemma1_suite(1000, 2025);
    c.expect(r.cases >= 1000, "case count " + std::to_string(r.cases));
    c.expect(r.failures == 0, "equality failures");
}

void c05_coarse_dominates(Check& c) {
    // the coarse bound must never undercut the tight one, wherever defined
    Rng rng(505);
    int compared = 0;
    for (int i = 0; i < 300; ++i) {
        const EmpiricalDistribution d = random_distribution(rng, 10);
        const RashomonProfile prof = build_profile(d);
        if (prof.levels.front().margin == 0) continue;  // coarse undefined
        for (const Rat& eps : epsilon_grid(prof)) {
            ++compared;
            if (legacy_bound(prof, eps) < multiplicity_bound(prof, eps).bound) {
                c.expect(false, "undercut at instance " + std::to_string(i));
                return;
            }
        }
    }
    c.expect(compared > 1000, "grid coverage");

    const RashomonProfile ref = build_profile(example_dist());
    for (const Rat& eps : epsilon_grid(ref))
        c.expect(legacy_bound(ref, eps) >= multiplicity_bound(ref, eps).bound,
                 "undercut on the reference grid");
}

void c06_pairwise_suites(Check& c) {
    for (const SuiteResult& r :
         {run_prop3_suite(200, 2026), run_prop4_suite(200, 2027),
          run_prop5_suite(200, 2028)}) {
        c.expect(r.cases >= 200, r.name + " case count");
        c.expect(r.failures == 0, r.name + " failures");
    }
}

void c07_dominance_scan(Check& c) {
    // cases = trials whose score laws pass the dominance filter; the rest
    // don't exercise the implication and are counted as skipped
    const SuiteResult r = run_prop1_suite(10000, 2029);
    c.expect(r.cases > 2000, "dominance filter accepted too few trials: " +
                                 std::to_string(r.cases));
    c.expect(r.failures == 0, "rate/mean ordering failures");
}

void c08_zeroing_identity_and_drop(Check& c) {
    const SuiteResult r = run_prop6_suite(100, 2030);
    c.expect(r.cases >= 100, "seed count");
    c.expect(r.failures == 0, "identity failures");

    // flagship reproduction: window mass ~6.9% of B, DI drop 14.5pp +/- 1pp
    const AuditReport& rep = flagship_audit();
    double drop_sum = 0, pq_sum = 0;
    int n = 0;
    for (const SplitAudit& s : rep.splits) {
        if (!s.zero_pa) continue;
        drop_sum += to_double(s.zero_pa->predicted_di_drop);
        pq_sum += to_double(s.zero_pa->p_q);
        ++n;
        const double split_drop = to_double(s.zero_pa->predicted_di_drop);
        c.expect(std::abs(split_drop - kDropCenter) < kDropTol + 0.005,
                 "split drop " + std::to_string(split_drop));
    }
    c.expect(n == 10, "zeroing analysis present on every split");
    c.expect(std::abs(drop_sum / n - kDropCenter) <= kDropTol,
             "mean predicted drop " + std::to_string(drop_sum / n));
    c.expect(std::abs(pq_sum / n - kPqCenter) <= kPqTol,
             "mean window mass " + std::to_string(pq_sum / n));
}

void c09_trainer_checks(Check& c) {
    // gradient against central differences
    Rng rng(909);
    std::vector<std::vector<double>> rows(60, std::vector<double>(3));
    std::vector<int> labels(60);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (double& v : rows[i]) v = rng.normal();
        labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    const std::vector<double> w{0.2, -0.7, 1.1, -0.4};
    for (double l2 : {0.0, 0.3}) {
        const LossGrad lg = logistic_loss_grad(rows, labels, w, l2);
        for (std::size_t j = 0; j < w.size(); ++j) {
            std::vector<double> wp = w, wm = w;
            wp[j] += 1e-6;
            wm[j] -= 1e-6;
            const double num =
                (logistic_loss_grad(rows, labels, wp, l2).loss -
                 logistic_loss_grad(rows, labels, wm, l2).loss) /
                2e-6;
            c.expect(std::abs(lg.grad[j] - num) < kGradTol, "gradient mismatch");
        }
    }

    // planted-coefficient recovery
    const double b0 = -1.0, w1 = 0.5, w2 = -0.8, cg = -0.7;
    RowDataset data;
    data.feature_names = {"u", "v"};
    Rng gen(910);
    for (int i = 0; i < 40000; ++i) {
        const double u = static_cast<double>(gen.uniform_int(0, 6));
        const double v = static_cast<double>(gen.uniform_int(0, 1));
        const Group g = gen.bernoulli(0.5) ? Group::B : Group::A;
        data.features.push_back({u, v});
        data.group.push_back(g);
        data.label.push_back(
            gen.bernoulli(sigmoid(b0 + w1 * u + w2 * v + (g == Group::B ? cg : 0)))
                ? 1
                : 0);
    }
    const LRModel m = train(data, true, TrainConfig{});
    c.expect(std::abs(m.intercept - b0) < kCoefTol, "intercept recovery");
    c.expect(std::abs(m.coefficients[0] - w1) < kCoefTol, "coef u recovery");
    c.expect(std::abs(m.coefficients[1] - w2) < kCoefTol, "coef v recovery");
    c.expect(std::abs(m.pa_coef() - cg) < kCoefTol, "group coef recovery");

    // descent never increases the loss along its own trajectory
    std::vector<double> wd(4, 0.0);
    double prev = logistic_loss_grad(rows, labels, wd, 0.0).loss;
    for (int it = 0; it < 80; ++it) {
        const LossGrad lg = logistic_loss_grad(rows, labels, wd, 0.0);
        for (std::size_t j = 0; j < wd.size(); ++j) wd[j] -= 0.4 * lg.grad[j];
        const double cur = logistic_loss_grad(rows, labels, wd, 0.0).loss;
        c.expect(cur <= prev + 1e-12, "loss increased");
        prev = cur;
    }
}

void c10_flagship_audit(Check& c) {
    const AuditReport& rep = flagship_audit();
    c.expect(rep.splits.size() == 10, "split count");
    for (const SplitAudit& s : rep.splits) {
        c.expect(s.rel_reduction_di_abs >= kDiReductionMin,
                 "split " + std::to_string(s.split_index) + " |DI| reduction " +
                     std::to_string(s.rel_reduction_di_abs));
        c.expect(s.rel_reduction_accuracy < kAccReductionMax,
                 "split " + std::to_string(s.split_index) + " accuracy cost " +
                     std::to_string(s.rel_reduction_accuracy));
    }
    c.expect(rep.splits_with_lower_unaware_di == 10, "every split improves");
}

void c11_policy_comparison(Check& c) {
    SynthConfig scfg;
    scfg.profile = SynthProfile::almp_like;
    scfg.n = 60000;
    scfg.group_offset = -0.3;
    scfg.seed = 13;
    PolicyConfig pcfg;
    pcfg.tau = 0.25;
    pcfg.protocol.splits = 10;
    pcfg.protocol.seed = 7;
    const PolicyReport rep = run_policy_lr(generate_synthetic(scfg).data, pcfg);

    c.expect(rep.aware.splits.size() == 10, "aware split count");
    c.expect(rep.unaware.splits.size() == 10, "unaware split count");
    c.expect(rep.unaware.delta.mean <= rep.aware.delta.mean,
             "unaware gap exceeds aware gap");
    for (const PolicyVariant* v : {&rep.aware, &rep.unaware}) {
        c.expect(v->c_rate_a.mean > 0.0 && v->c_rate_a.mean < 1.0,
                 "degenerate assignment rate A");
        c.expect(v->c_rate_b.mean > 0.0 && v->c_rate_b.mean < 1.0,
                 "degenerate assignment rate B");
        c.expect(v->delta.stddev >= 0.0, "bad deviation");
    }
    // the aware gap is real, not split noise
    c.expect(rep.aware.delta.mean > 3.0 * rep.aware.delta.stddev,
             "aware gap within noise");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria{
        {"reference distribution: rates, calibration, thresholds", 1.0,
         c01_reference_fixture},
        {"bound table matches the exhaustive maximum", 1.0, c02_bound_table},
        {"soundness/tightness scan, 1000 random instances", 120.0,
         c03_soundness_scan},
        {"randomized-achiever expectation equalities, 1000 instances", 60.0,
         c04_achiever_expectations},
        {"coarse bound never undercuts the tight bound", 60.0,
         c05_coarse_dominates},
        {"pairwise bound suites, 200 instances each", 300.0, c06_pairwise_suites},
        {"score-law dominance scan, 10000 trials", 30.0, c07_dominance_scan},
        {"coefficient-zeroing identity and flagship reproduction", 120.0,
         c08_zeroing_identity_and_drop},
        {"trainer: gradients, recovery, monotone descent", 60.0,
         c09_trainer_checks},
        {"flagship audit: DI reduction vs accuracy cost", 300.0,
         c10_flagship_audit},
        {"threshold-policy comparison on enrollment-style data", 180.0,
         c11_policy_comparison},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& cr = criteria[i];
        Check chk;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            cr.run(chk);
        } catch (const std::exception& e) {
            chk.expect(false, std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (secs > cr.budget_s)
            chk.expect(false, "over budget (" + std::to_string(secs) + "s > " +
                                  std::to_string(cr.budget_s) + "s)");
        std::printf("[%s] %02zu %-58s %7.2fs", chk.ok ? "PASS" : "FAIL", i + 1,
                    cr.name, secs);
        const std::string detail = chk.out.str();
        if (!detail.empty()) std::printf("  %s", detail.c_str());
        std::printf("\n");
        failures += chk.ok ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures;
}
