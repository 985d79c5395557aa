#include "fairmult/policy.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "fairmult/errors.hpp"
#include "fairmult/metrics.hpp"

namespace fairmult {

namespace {

// Assignment works on the score itself ("score below tau"), so the cut is a
// plain exact comparison; tau = 1 is allowed, unlike the (0,1) threshold
// classifier.
Classifier cut_at(const Predictor& pred, const Rat& tau) {
    std::vector<int> bits(pred.values.size());
    for (std::size_t i = 0; i < pred.values.size(); ++i)
        bits[i] = pred.values[i] >= tau ? 1 : 0;
    return Classifier::det(std::move(bits));
}

PolicySplitRow eval_policy(const EmpiricalDistribution& dist,
                           const Predictor& pred,
                           const std::vector<std::pair<double, int>>& scored,
                           const Rat& tau, std::size_t split_index) {
    const Classifier f = cut_at(pred, tau);
    PolicySplitRow row;
    row.split_index = split_index;
    row.c_rate_a = to_double(Rat(1) - positive_rate(dist, f, Group::A));
    row.c_rate_b = to_double(Rat(1) - positive_rate(dist, f, Group::B));
    row.delta = std::abs(row.c_rate_b - row.c_rate_a);
    row.auroc = auroc(scored);
    return row;
}

void finalize_variant(PolicyVariant& v) {
    std::vector<double> ca, cb, dl, au;
    for (const PolicySplitRow& r : v.splits) {
        ca.push_back(r.c_rate_a);
        cb.push_back(r.c_rate_b);
        dl.push_back(r.delta);
        au.push_back(r.auroc);
    }
    v.c_rate_a = aggregate(ca);
    v.c_rate_b = aggregate(cb);
    v.delta = aggregate(dl);
    v.auroc = aggregate(au);
}

void check_tau(double tau) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("policy threshold must lie in (0,1]");
}

}  // namespace

PolicyReport run_policy_lr(const RowDataset& data, const PolicyConfig& cfg) {
    data.validate();
    check_tau(cfg.tau);
    if (cfg.protocol.splits < 1)
        throw std::invalid_argument("need at least one split");

    PolicyReport rep;
    rep.config = cfg;
    rep.config.mode = ModelMode::lr;
    rep.n_rows = data.n_rows();
    rep.aware.splits.resize(cfg.protocol.splits);
    rep.unaware.splits.resize(cfg.protocol.splits);
    const Rat tau = rat_from_double(cfg.tau);

    parallel_splits(cfg.protocol.splits, [&](std::size_t s) {
        const SplitIndices si = split_rows(data.n_rows(), cfg.protocol.test_frac,
                                           cfg.protocol.seed, s);
        const RowDataset tr = subset_rows(data, si.train);
        const RowDataset te = subset_rows(data, si.test);
        const Aggregation agg = aggregate_rows(te);

        const auto eval_model = [&](const LRModel& m) {
            const std::vector<double> lo = point_logits(m, agg);
            const Predictor pred = predictor_from_logits(lo);
            std::vector<std::pair<double, int>> scored;
            scored.reserve(te.n_rows());
            for (std::size_t r = 0; r < te.n_rows(); ++r)
                scored.emplace_back(lo[agg.point_of_row[r]], te.label[r]);
            return eval_policy(agg.dist, pred, scored, tau, s);
        };
        rep.aware.splits[s] = eval_model(train(tr, true, cfg.train));
        rep.unaware.splits[s] = eval_model(train(tr, false, cfg.train));
    });

    finalize_variant(rep.aware);
    finalize_variant(rep.unaware);
    return rep;
}

PolicyReport run_policy_scores(const ScoreFile& aware, const ScoreFile& unaware,
                               const PolicyConfig& cfg) {
    check_tau(cfg.tau);
    if (cfg.protocol.splits < 1)
        throw std::invalid_argument("need at least one split");
    const std::vector<JoinedScoreRow> joined = join_scores(aware, unaware);

    PolicyReport rep;
    rep.config = cfg;
    rep.config.mode = ModelMode::scores;
    rep.n_rows = joined.size();
    rep.aware.splits.resize(cfg.protocol.splits);
    rep.unaware.splits.resize(cfg.protocol.splits);
    const Rat tau = rat_from_double(cfg.tau);

    parallel_splits(cfg.protocol.splits, [&](std::size_t s) {
        const SplitIndices si = split_rows(joined.size(), cfg.protocol.test_frac,
                                           cfg.protocol.seed, s);
        const auto eval_side = [&](bool aware_side) {
            RowDataset d;
            d.feature_names = {"score"};
            d.features.reserve(si.test.size());
            for (std::size_t i : si.test) {
                const JoinedScoreRow& r = joined[i];
                d.features.push_back(
                    {aware_side ? r.aware_score : r.unaware_score});
                d.group.push_back(r.group);
                d.label.push_back(r.label);
            }
            const Aggregation agg = aggregate_rows(d);
            Predictor pred;
            pred.values.reserve(agg.dist.size());
            for (std::size_t p = 0; p < agg.dist.size(); ++p)
                pred.values.push_back(rat_from_double(agg.point_features[p][0]));
            std::vector<std::pair<double, int>> scored;
            scored.reserve(d.n_rows());
            for (std::size_t r = 0; r < d.n_rows(); ++r)
                scored.emplace_back(d.features[r][0], d.label[r]);
            return eval_policy(agg.dist, pred, scored, tau, s);
        };
        rep.aware.splits[s] = eval_side(true);
        rep.unaware.splits[s] = eval_side(false);
    });

    finalize_variant(rep.aware);
    finalize_variant(rep.unaware);
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

ojson j_variant(const PolicyVariant& v) {
    ojson splits = ojson::array();
    for (const PolicySplitRow& r : v.splits) {
        splits.push_back(ojson{{"split", r.split_index},
                               {"c_rate_a", r.c_rate_a},
                               {"c_rate_b", r.c_rate_b},
                               {"delta", r.delta},
                               {"auroc", r.auroc}});
    }
    return ojson{{"splits", std::move(splits)},
                 {"c_rate_a", j_stat(v.c_rate_a)},
                 {"c_rate_b", j_stat(v.c_rate_b)},
                 {"delta", j_stat(v.delta)},
                 {"auroc", j_stat(v.auroc)}};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string policy_report_json(const PolicyReport& rep) {
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
        {"train", ojson{{"learning_rate", rep.config.train.learning_rate},
                        {"max_iters", rep.config.train.max_iters},
                        {"convergence_tol", rep.config.train.convergence_tol},
                        {"l2_penalty", rep.config.train.l2_penalty}}},
    };
    doc["warnings"] = rep.warnings;
    doc["aware"] = j_variant(rep.aware);
    doc["unaware"] = j_variant(rep.unaware);
    return doc.dump(2) + "\n";
}

CsvTable policy_summary_csv(const PolicyReport& rep) {
    CsvTable t;
    t.header = {"mode",          "c_rate_a_mean", "c_rate_a_std",
                "c_rate_b_mean", "c_rate_b_std",  "delta_mean",
                "delta_std",     "auroc_mean",    "auroc_std"};
    const auto push = [&](const char* name, const PolicyVariant& v) {
        t.rows.push_back({name, fmt(v.c_rate_a.mean), fmt(v.c_rate_a.stddev),
                          fmt(v.c_rate_b.mean), fmt(v.c_rate_b.stddev),
                          fmt(v.delta.mean), fmt(v.delta.stddev),
                          fmt(v.auroc.mean), fmt(v.auroc.stddev)});
    };
    push("aware", rep.aware);
    push("unaware", rep.unaware);
    return t;
}

}  // namespace fairmult
