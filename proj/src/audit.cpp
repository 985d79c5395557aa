#include "fairmult/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "fairmult/errors.hpp"
#include "fairmult/metrics.hpp"
#include "fairmult/rashomon.hpp"
#include "fairmult/rng.hpp"

namespace fairmult {

// ---------------------------------------------------------------------------
// Provenance and split plumbing
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    char out[32];
    std::snprintf(out, sizeof out, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return out;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("FAIRMULT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw DataError("FAIRMULT_THREADS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

void parallel_splits(std::size_t splits,
                     const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_count(), splits);
    if (workers <= 1) {
        for (std::size_t s = 0; s < splits; ++s) fn(s);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex err_mu;
    std::exception_ptr first_err;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t s = w; s < splits; s += workers) {
                try {
                    fn(s);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_err) first_err = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_err) std::rethrow_exception(first_err);
}

SplitIndices split_rows(std::size_t n_rows, double test_frac,
                        std::uint64_t seed, std::size_t split_index) {
    if (n_rows < 2) throw DataError("need at least two rows to split");
    if (!(test_frac > 0.0 && test_frac < 1.0))
        throw std::invalid_argument("test fraction must lie in (0,1)");
    std::vector<std::size_t> perm(n_rows);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed ^ (0x9e3779b97f4a7c15ull * (split_index + 1)));
    rng.shuffle(perm);

    std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_frac * static_cast<double>(n_rows)));
    n_test = std::clamp(n_test, std::size_t{1}, n_rows - 1);

    SplitIndices out;
    out.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(out.test.begin(), out.test.end());
    std::sort(out.train.begin(), out.train.end());
    return out;
}

RowDataset subset_rows(const RowDataset& data,
                       const std::vector<std::size_t>& rows) {
    RowDataset out;
    out.feature_names = data.feature_names;
    out.features.reserve(rows.size());
    for (std::size_t i : rows) {
        out.features.push_back(data.features[i]);
        out.group.push_back(data.group[i]);
        out.label.push_back(data.label[i]);
    }
    return out;
}

AggregateStat aggregate(const std::vector<double>& xs) {
    AggregateStat st;
    if (xs.empty()) return st;
    st.mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
              static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - st.mean) * (x - st.mean);
        st.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return st;
}

const char* model_mode_name(ModelMode m) {
    return m == ModelMode::lr ? "lr" : "scores";
}

std::vector<JoinedScoreRow> join_scores(const ScoreFile& aware,
                                        const ScoreFile& unaware) {
    std::unordered_map<std::string, std::size_t> pos;
    pos.reserve(unaware.rows.size());
    for (std::size_t i = 0; i < unaware.rows.size(); ++i)
        if (!pos.emplace(unaware.rows[i].row_id, i).second)
            throw DataError("duplicate row_id '" + unaware.rows[i].row_id +
                            "' in unaware score file");
    if (aware.rows.size() != unaware.rows.size())
        throw DataError("score files cover different numbers of rows");

    std::vector<JoinedScoreRow> out;
    out.reserve(aware.rows.size());
    std::vector<char> used(unaware.rows.size(), 0);
    for (const ScoreRow& ar : aware.rows) {
        const auto it = pos.find(ar.row_id);
        if (it == pos.end())
            throw DataError("row_id '" + ar.row_id +
                            "' missing from unaware score file");
        if (used[it->second])
            throw DataError("duplicate row_id '" + ar.row_id +
                            "' in aware score file");
        used[it->second] = 1;
        const ScoreRow& ur = unaware.rows[it->second];
        if (ur.group != ar.group)
            throw DataError("group mismatch between score files at row_id '" +
                            ar.row_id + "'");
        if (ur.label != ar.label)
            throw DataError("label mismatch between score files at row_id '" +
                            ar.row_id + "'");
        out.push_back(JoinedScoreRow{ar.group, ar.label, ar.score, ur.score});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-split evaluation
// ---------------------------------------------------------------------------

namespace {

double rel_reduction(double aware, double unaware) {
    return aware == 0.0 ? 0.0 : (aware - unaware) / aware;
}

CalibrationSummary calib_summary(const EmpiricalDistribution& dist,
                                 const Predictor& pred, double tol) {
    // 100 equal-width bins, midpoint representative; exact atoms are kept
    // for every other metric.
    Predictor binned;
    binned.values.reserve(pred.values.size());
    for (const Rat& v : pred.values) {
        const double x = to_double(v);
        int k = x >= 1.0 ? 99 : static_cast<int>(x * 100.0);
        k = std::clamp(k, 0, 99);
        binned.values.push_back(Rat(2 * k + 1) / Rat(200));
    }

    CalibrationSummary cs;
    const PredictionDistribution pd = prediction_distributions(dist, binned);
    cs.levels = pd.a.size() + pd.b.size();
    const Rat tol_rat = rat_from_double(tol);
    const CalibrationReport rep =
        check_calibration(dist, binned, CalibScope::per_group, Rat(0));
    for (const CalibrationViolation& v : rep.violations) {
        const Rat dev = rat_abs(v.deviation);
        cs.max_abs_deviation = std::max(cs.max_abs_deviation, to_double(dev));
        if (dev > tol_rat) ++cs.violations;
    }
    return cs;
}

VariantMetrics eval_on_dist(const EmpiricalDistribution& dist,
                            const Classifier& f, const Predictor& pred,
                            const std::vector<std::pair<double, int>>& scored,
                            double calib_tol) {
    VariantMetrics vm;
    vm.accuracy = to_double(accuracy(dist, f));
    vm.di_signed = to_double(disparate_impact(dist, f));
    vm.di_abs = std::abs(vm.di_signed);
    vm.rate_a = to_double(positive_rate(dist, f, Group::A));
    vm.rate_b = to_double(positive_rate(dist, f, Group::B));
    vm.auroc = auroc(scored);
    vm.calibration = calib_summary(dist, pred, calib_tol);
    return vm;
}

std::vector<BoundRow> bound_rows(const EmpiricalDistribution& dist,
                                 const std::vector<double>& grid) {
    std::vector<BoundRow> rows;
    if (grid.empty()) return rows;
    const RashomonProfile prof = build_profile(dist);
    for (double e : grid) {
        const BoundCertificate cert = multiplicity_bound(prof, rat_from_double(e));
        BoundRow row;
        row.epsilon = e;
        row.margin = to_double(cert.margin);
        row.bound = to_double(cert.bound);
        try {
            row.legacy = to_double(legacy_bound(prof, rat_from_double(e)));
        } catch (const std::invalid_argument&) {
            // p = 1/2 atoms make the legacy denominator vanish
        }
        rows.push_back(row);
    }
    return rows;
}

void finalize_aggregates(AuditReport& rep) {
    std::vector<double> aw_acc, un_acc, aw_di, un_di, aw_auc, un_auc;
    for (const SplitAudit& sa : rep.splits) {
        aw_acc.push_back(sa.aware.accuracy);
        un_acc.push_back(sa.unaware.accuracy);
        aw_di.push_back(sa.aware.di_abs);
        un_di.push_back(sa.unaware.di_abs);
        aw_auc.push_back(sa.aware.auroc);
        un_auc.push_back(sa.unaware.auroc);
        if (sa.unaware.di_abs < sa.aware.di_abs)
            ++rep.splits_with_lower_unaware_di;
    }
    rep.aware_accuracy = aggregate(aw_acc);
    rep.unaware_accuracy = aggregate(un_acc);
    rep.aware_di_abs = aggregate(aw_di);
    rep.unaware_di_abs = aggregate(un_di);
    rep.aware_auroc = aggregate(aw_auc);
    rep.unaware_auroc = aggregate(un_auc);
    rep.rel_reduction_di_abs =
        rel_reduction(rep.aware_di_abs.mean, rep.unaware_di_abs.mean);
    rep.rel_reduction_accuracy =
        rel_reduction(rep.aware_accuracy.mean, rep.unaware_accuracy.mean);
}

RowDataset score_side_dataset(const std::vector<JoinedScoreRow>& joined,
                              const std::vector<std::size_t>& rows,
                              bool aware_side) {
    RowDataset d;
    d.feature_names = {"score"};
    d.features.reserve(rows.size());
    for (std::size_t i : rows) {
        const JoinedScoreRow& r = joined[i];
        d.features.push_back({aware_side ? r.aware_score : r.unaware_score});
        d.group.push_back(r.group);
        d.label.push_back(r.label);
    }
    return d;
}

VariantMetrics eval_score_side(const RowDataset& d, double tau,
                               double calib_tol) {
    const Aggregation agg = aggregate_rows(d);
    Predictor pred;
    pred.values.reserve(agg.dist.size());
    for (std::size_t p = 0; p < agg.dist.size(); ++p)
        pred.values.push_back(rat_from_double(agg.point_features[p][0]));
    const Classifier f = threshold(pred, rat_from_double(tau));
    std::vector<std::pair<double, int>> scored;
    scored.reserve(d.n_rows());
    for (std::size_t r = 0; r < d.n_rows(); ++r)
        scored.emplace_back(d.features[r][0], d.label[r]);
    return eval_on_dist(agg.dist, f, pred, scored, calib_tol);
}

}  // namespace

// ---------------------------------------------------------------------------
// Audit drivers
// ---------------------------------------------------------------------------

AuditReport run_audit_lr(const RowDataset& data, const AuditConfig& cfg) {
    data.validate();
    if (cfg.protocol.splits < 1)
        throw std::invalid_argument("need at least one split");

    AuditReport rep;
    rep.config = cfg;
    rep.config.mode = ModelMode::lr;
    rep.n_rows = data.n_rows();
    rep.splits.resize(cfg.protocol.splits);

    parallel_splits(cfg.protocol.splits, [&](std::size_t s) {
        const SplitIndices si = split_rows(data.n_rows(), cfg.protocol.test_frac,
                                           cfg.protocol.seed, s);
        const RowDataset tr = subset_rows(data, si.train);
        const RowDataset te = subset_rows(data, si.test);
        const LRModel aware = train(tr, true, cfg.train);
        const LRModel unaware = train(tr, false, cfg.train);
        const Aggregation agg = aggregate_rows(te);

        const auto eval_model = [&](const LRModel& m) {
            const std::vector<double> lo = point_logits(m, agg);
            const Classifier f = classify_logits(lo, cfg.tau);
            const Predictor pred = predictor_from_logits(lo);
            // AUROC ranks on logits: monotone in the score, no sigmoid
            // saturation ties.
            std::vector<std::pair<double, int>> scored;
            scored.reserve(te.n_rows());
            for (std::size_t r = 0; r < te.n_rows(); ++r)
                scored.emplace_back(lo[agg.point_of_row[r]], te.label[r]);
            return eval_on_dist(agg.dist, f, pred, scored, cfg.calibration_tol);
        };

        SplitAudit& sa = rep.splits[s];
        sa.split_index = s;
        sa.n_train = tr.n_rows();
        sa.n_test = te.n_rows();
        sa.dbr_test = to_double(dbr(agg.dist));
        sa.aware = eval_model(aware);
        sa.unaware = eval_model(unaware);
        sa.zero_pa = analyze_zero_pa(agg, aware, cfg.tau);
        sa.aware_pa_coef = aware.pa_coef();
        sa.rel_reduction_di_abs =
            rel_reduction(sa.aware.di_abs, sa.unaware.di_abs);
        sa.rel_reduction_accuracy =
            rel_reduction(sa.aware.accuracy, sa.unaware.accuracy);

        if (s == 0) {
            rep.aware_model_text = serialize(aware);
            rep.unaware_model_text = serialize(unaware);
            std::size_t non_pa = 0, j_feat = 0;
            for (std::size_t j = 0; j < aware.coefficients.size(); ++j) {
                if (aware.pa_index && *aware.pa_index == j) continue;
                ++non_pa;
                j_feat = j;
            }
            if (non_pa == 1 && aware.coefficients[j_feat] != 0.0) {
                const double w = aware.coefficients[j_feat];
                const double t = logit(cfg.tau);
                rep.single_feature = SingleFeatureCut{
                    aware.feature_names[j_feat],
                    (t - aware.intercept) / w,
                    (t - aware.intercept - aware.pa_coef()) / w};
            }
        }
    });

    finalize_aggregates(rep);
    rep.bounds = bound_rows(from_rows(data), cfg.eps_grid);
    return rep;
}

AuditReport run_audit_scores(const ScoreFile& aware, const ScoreFile& unaware,
                             const AuditConfig& cfg) {
    if (cfg.protocol.splits < 1)
        throw std::invalid_argument("need at least one split");
    const std::vector<JoinedScoreRow> joined = join_scores(aware, unaware);

    AuditReport rep;
    rep.config = cfg;
    rep.config.mode = ModelMode::scores;
    rep.n_rows = joined.size();
    rep.splits.resize(cfg.protocol.splits);

    parallel_splits(cfg.protocol.splits, [&](std::size_t s) {
        const SplitIndices si = split_rows(joined.size(), cfg.protocol.test_frac,
                                           cfg.protocol.seed, s);
        const RowDataset aw = score_side_dataset(joined, si.test, true);
        const RowDataset un = score_side_dataset(joined, si.test, false);

        SplitAudit& sa = rep.splits[s];
        sa.split_index = s;
        sa.n_train = si.train.size();
        sa.n_test = si.test.size();
        sa.dbr_test = to_double(dbr(aggregate_rows(aw).dist));
        sa.aware = eval_score_side(aw, cfg.tau, cfg.calibration_tol);
        sa.unaware = eval_score_side(un, cfg.tau, cfg.calibration_tol);
        sa.rel_reduction_di_abs =
            rel_reduction(sa.aware.di_abs, sa.unaware.di_abs);
        sa.rel_reduction_accuracy =
            rel_reduction(sa.aware.accuracy, sa.unaware.accuracy);
    });

    finalize_aggregates(rep);
    if (!cfg.eps_grid.empty()) {
        std::vector<std::size_t> all(joined.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        rep.bounds =
            bound_rows(from_rows(score_side_dataset(joined, all, true)),
                       cfg.eps_grid);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

using ojson = nlohmann::ordered_json;

ojson j_stat(const AggregateStat& s) {
    return ojson{{"mean", s.mean}, {"stddev", s.stddev}};
}

ojson j_variant(const VariantMetrics& v) {
    return ojson{
        {"accuracy", v.accuracy},
        {"auroc", v.auroc},
        {"di_signed", v.di_signed},
        {"di_abs", v.di_abs},
        {"rate_a", v.rate_a},
        {"rate_b", v.rate_b},
        {"calibration",
         ojson{{"levels", v.calibration.levels},
               {"violations", v.calibration.violations},
               {"max_abs_deviation", v.calibration.max_abs_deviation}}},
    };
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string audit_report_json(const AuditReport& rep) {
    ojson doc;
    doc["tool_version"] = rep.tool_version;
    doc["dataset"] = ojson{{"path", rep.dataset_path},
                           {"hash", rep.dataset_hash},
                           {"rows", rep.n_rows},
                           {"group_a", rep.group_a_value},
                           {"group_b", rep.group_b_value}};
    doc["config"] = ojson{
        {"mode", model_mode_name(rep.config.mode)},
        {"tau", rep.config.tau},
        {"splits", rep.config.protocol.splits},
        {"test_frac", rep.config.protocol.test_frac},
        {"seed", rep.config.protocol.seed},
        {"calibration_tol", rep.config.calibration_tol},
        {"eps_grid", rep.config.eps_grid},
        {"train", ojson{{"learning_rate", rep.config.train.learning_rate},
                        {"max_iters", rep.config.train.max_iters},
                        {"convergence_tol", rep.config.train.convergence_tol},
                        {"l2_penalty", rep.config.train.l2_penalty}}},
    };
    doc["warnings"] = rep.warnings;

    doc["splits"] = ojson::array();
    for (const SplitAudit& sa : rep.splits) {
        ojson js;
        js["split"] = sa.split_index;
        js["n_train"] = sa.n_train;
        js["n_test"] = sa.n_test;
        js["dbr_test"] = sa.dbr_test;
        js["aware"] = j_variant(sa.aware);
        js["unaware"] = j_variant(sa.unaware);
        if (sa.aware_pa_coef) js["aware_pa_coef"] = *sa.aware_pa_coef;
        if (sa.zero_pa) {
            const ZeroPaReport& z = *sa.zero_pa;
            js["zero_pa"] = ojson{
                {"c_g", z.c_g},
                {"p_q", to_double(z.p_q)},
                {"p_b", to_double(z.p_b)},
                {"q_points", z.q_points.size()},
                {"acc_f", to_double(z.acc_f)},
                {"acc_fprime", to_double(z.acc_fprime)},
                {"di_f", to_double(z.di_f)},
                {"di_fprime", to_double(z.di_fprime)},
                {"acc_bound", to_double(z.acc_bound)},
                {"predicted_di_drop", to_double(z.predicted_di_drop)},
                {"b_still_disadvantaged", z.b_still_disadvantaged},
            };
        }
        js["rel_reduction_di_abs"] = sa.rel_reduction_di_abs;
        js["rel_reduction_accuracy"] = sa.rel_reduction_accuracy;
        doc["splits"].push_back(std::move(js));
    }

    doc["aggregate"] = ojson{
        {"aware", ojson{{"accuracy", j_stat(rep.aware_accuracy)},
                        {"di_abs", j_stat(rep.aware_di_abs)},
                        {"auroc", j_stat(rep.aware_auroc)}}},
        {"unaware", ojson{{"accuracy", j_stat(rep.unaware_accuracy)},
                          {"di_abs", j_stat(rep.unaware_di_abs)},
                          {"auroc", j_stat(rep.unaware_auroc)}}},
        {"rel_reduction_di_abs", rep.rel_reduction_di_abs},
        {"rel_reduction_accuracy", rep.rel_reduction_accuracy},
        {"splits_with_lower_unaware_di", rep.splits_with_lower_unaware_di},
    };

    if (rep.single_feature) {
        doc["single_feature"] = ojson{
            {"feature", rep.single_feature->feature},
            {"threshold_a", rep.single_feature->threshold_a},
            {"threshold_b", rep.single_feature->threshold_b},
        };
    }
    if (!rep.aware_model_text.empty()) {
        doc["models"] = ojson{{"aware", rep.aware_model_text},
                              {"unaware", rep.unaware_model_text}};
    }

    doc["bounds"] = ojson::array();
    for (const BoundRow& b : rep.bounds) {
        ojson jb{{"epsilon", b.epsilon},
                 {"margin", b.margin},
                 {"bound", b.bound}};
        jb["legacy"] = b.legacy ? ojson(*b.legacy) : ojson(nullptr);
        doc["bounds"].push_back(std::move(jb));
    }
    return doc.dump(2) + "\n";
}

CsvTable audit_summary_csv(const AuditReport& rep) {
    CsvTable t;
    t.header = {"split",
                "n_train",
                "n_test",
                "aware_accuracy",
                "unaware_accuracy",
                "aware_di_abs",
                "unaware_di_abs",
                "aware_di_signed",
                "unaware_di_signed",
                "aware_auroc",
                "unaware_auroc",
                "rel_reduction_accuracy",
                "rel_reduction_di_abs"};
    for (const SplitAudit& sa : rep.splits) {
        t.rows.push_back({std::to_string(sa.split_index),
                          std::to_string(sa.n_train),
                          std::to_string(sa.n_test),
                          fmt(sa.aware.accuracy),
                          fmt(sa.unaware.accuracy),
                          fmt(sa.aware.di_abs),
                          fmt(sa.unaware.di_abs),
                          fmt(sa.aware.di_signed),
                          fmt(sa.unaware.di_signed),
                          fmt(sa.aware.auroc),
                          fmt(sa.unaware.auroc),
                          fmt(sa.rel_reduction_accuracy),
                          fmt(sa.rel_reduction_di_abs)});
    }
    const SplitAudit& s0 = rep.splits.front();
    t.rows.push_back({"mean",
                      std::to_string(s0.n_train),
                      std::to_string(s0.n_test),
                      fmt(rep.aware_accuracy.mean),
                      fmt(rep.unaware_accuracy.mean),
                      fmt(rep.aware_di_abs.mean),
                      fmt(rep.unaware_di_abs.mean),
                      "",
                      "",
                      fmt(rep.aware_auroc.mean),
                      fmt(rep.unaware_auroc.mean),
                      fmt(rep.rel_reduction_accuracy),
                      fmt(rep.rel_reduction_di_abs)});
    return t;
}

}  // namespace fairmult
