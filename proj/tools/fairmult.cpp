// fairmult — fairness auditing under aware/unaware model multiplicity.
//
// Subcommands: audit, bounds, policy-eval, synth, oracle-verify.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairmult/audit.hpp"
#include "fairmult/csvio.hpp"
#include "fairmult/errors.hpp"
#include "fairmult/logreg.hpp"
#include "fairmult/metrics.hpp"
#include "fairmult/oracle.hpp"
#include "fairmult/policy.hpp"
#include "fairmult/rashomon.hpp"
#include "fairmult/synth.hpp"

namespace {

using namespace fairmult;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty())
        std::cout << text;
    else
        write_text(path, text);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::optional<std::string> opt_str(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

void check_eps_grid(const std::vector<double>& grid) {
    for (double e : grid)
        if (!(e >= 0.0))
            throw std::invalid_argument("epsilon values must be >= 0");
}

// ---------------------------------------------------------------------------
// audit / policy-eval shared ingestion
// ---------------------------------------------------------------------------

struct CommonDataArgs {
    std::string dataset;
    std::string group_col, label_col;
    std::vector<std::string> features;
    std::string group_a;
    std::string model = "lr";
    std::string aware_scores, unaware_scores;
};

void add_common_data_args(CLI::App* cmd, CommonDataArgs& a,
                          const char* label_flag, const char* label_desc) {
    cmd->add_option("dataset", a.dataset, "Input CSV (lr mode)");
    cmd->add_option("--group-col", a.group_col, "Protected-group column");
    cmd->add_option(label_flag, a.label_col, label_desc);
    cmd->add_option("--features", a.features,
                    "Feature columns (default: all other columns)")
        ->delimiter(',');
    cmd->add_option("--group-a", a.group_a,
                    "Raw group value to map to group A (default: higher "
                    "base rate)");
    cmd->add_option("--model", a.model, "Model mode")
        ->check(CLI::IsMember({"lr", "scores"}));
    cmd->add_option("--aware-scores", a.aware_scores,
                    "Aware score file (scores mode)");
    cmd->add_option("--unaware-scores", a.unaware_scores,
                    "Unaware score file (scores mode)");
}

struct LoadedData {
    // lr mode
    std::optional<IngestResult> ingested;
    // scores mode
    std::optional<ScoreFile> aware;
    std::optional<ScoreFile> unaware;

    std::string path, hash;
    std::string group_a_value, group_b_value;
    std::vector<std::string> warnings;
};

LoadedData load_common(const CommonDataArgs& a) {
    LoadedData out;
    if (a.model == "lr") {
        if (a.dataset.empty() || a.group_col.empty() || a.label_col.empty())
            throw std::invalid_argument(
                "lr mode needs a dataset plus --group-col and the label "
                "column option");
        IngestConfig ic;
        ic.group_col = a.group_col;
        ic.label_col = a.label_col;
        ic.feature_cols = a.features;
        ic.group_a_value = opt_str(a.group_a);
        out.ingested = ingest(read_csv(a.dataset), ic);
        out.path = a.dataset;
        out.hash = file_hash(a.dataset);
        out.group_a_value = out.ingested->group_a_value;
        out.group_b_value = out.ingested->group_b_value;
        out.warnings = out.ingested->warnings;
    } else {
        if (a.aware_scores.empty() || a.unaware_scores.empty())
            throw std::invalid_argument(
                "scores mode needs --aware-scores and --unaware-scores");
        if (!a.dataset.empty())
            throw std::invalid_argument(
                "scores mode reads the score files only; drop the dataset "
                "argument");
        out.aware = read_scores(a.aware_scores, opt_str(a.group_a));
        out.unaware = read_scores(a.unaware_scores, opt_str(a.group_a));
        out.path = a.aware_scores + "|" + a.unaware_scores;
        out.hash = file_hash(a.aware_scores) + "|" + file_hash(a.unaware_scores);
        out.group_a_value = out.aware->group_a_value;
        out.group_b_value = out.aware->group_b_value;
        for (const std::string& w : out.aware->warnings)
            out.warnings.push_back("aware scores: " + w);
        for (const std::string& w : out.unaware->warnings)
            out.warnings.push_back("unaware scores: " + w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Subcommand handlers
// ---------------------------------------------------------------------------

int run_audit_cmd(const CommonDataArgs& data_args, const AuditConfig& cfg_in,
                  const std::string& json_out, const std::string& csv_out) {
    AuditConfig cfg = cfg_in;
    if (!(cfg.tau > 0.0 && cfg.tau < 1.0))
        throw std::invalid_argument("audit threshold must lie in (0,1)");
    check_eps_grid(cfg.eps_grid);

    const LoadedData loaded = load_common(data_args);
    AuditReport rep = loaded.ingested
                          ? run_audit_lr(loaded.ingested->data, cfg)
                          : run_audit_scores(*loaded.aware, *loaded.unaware, cfg);
    rep.dataset_path = loaded.path;
    rep.dataset_hash = loaded.hash;
    rep.group_a_value = loaded.group_a_value;
    rep.group_b_value = loaded.group_b_value;
    rep.warnings = loaded.warnings;

    emit(audit_report_json(rep), json_out);
    if (!csv_out.empty()) write_csv(csv_out, audit_summary_csv(rep));
    return 0;
}

int run_policy_cmd(const CommonDataArgs& data_args, const PolicyConfig& cfg,
                   const std::string& json_out, const std::string& csv_out) {
    const LoadedData loaded = load_common(data_args);
    PolicyReport rep = loaded.ingested
                           ? run_policy_lr(loaded.ingested->data, cfg)
                           : run_policy_scores(*loaded.aware, *loaded.unaware,
                                               cfg);
    rep.dataset_path = loaded.path;
    rep.dataset_hash = loaded.hash;
    rep.group_a_value = loaded.group_a_value;
    rep.group_b_value = loaded.group_b_value;
    rep.warnings = loaded.warnings;

    emit(policy_report_json(rep), json_out);
    if (!csv_out.empty()) write_csv(csv_out, policy_summary_csv(rep));
    return 0;
}

int run_bounds_cmd(const std::string& input, const std::string& group_col,
                   const std::string& label_col,
                   const std::vector<std::string>& features,
                   const std::string& group_a,
                   const std::vector<std::string>& eps_texts, bool oracle,
                   int cap, const std::string& out_path) {
    // Budgets are read digit-exactly ("0.025" means 1/40, not the nearest
    // double) so the emitted bound column and the exhaustive oracle agree
    // as rationals.
    std::vector<Rat> eps_grid;
    for (const std::string& t : eps_texts) {
        Rat e = parse_rational(t);
        if (e < 0) throw std::invalid_argument("epsilon values must be >= 0");
        eps_grid.push_back(std::move(e));
    }
    std::optional<EmpiricalDistribution> dist;
    if (ends_with(input, ".json")) {
        dist = read_dist_json(input);
    } else {
        if (group_col.empty() || label_col.empty())
            throw std::invalid_argument(
                "CSV input needs --group-col and --label-col");
        IngestConfig ic;
        ic.group_col = group_col;
        ic.label_col = label_col;
        ic.feature_cols = features;
        ic.group_a_value = opt_str(group_a);
        dist = from_rows(ingest(read_csv(input), ic).data);
    }
    const RashomonProfile prof = build_profile(*dist);

    CsvTable t;
    t.header = {"epsilon", "margin", "bound", "legacy_bound"};
    if (oracle) {
        t.header.push_back("oracle_max");
        t.header.push_back("oracle_verdict");
    }
    bool violation = false;
    for (const Rat& eps : eps_grid) {
        const BoundCertificate cert = multiplicity_bound(prof, eps);
        std::vector<std::string> row{rat_to_string(eps),
                                     rat_to_string(cert.margin),
                                     rat_to_string(cert.bound)};
        try {
            row.push_back(rat_to_string(legacy_bound(prof, eps)));
        } catch (const std::invalid_argument&) {
            row.emplace_back();  // p = 1/2 atom: no legacy denominator
        }
        if (oracle) {
            const OracleResult r = max_disagreement_exact(*dist, eps, cap);
            row.push_back(rat_to_string(r.exact_value));
            row.push_back(verdict_name(r.verdict));
            violation = violation || r.verdict == Verdict::violation;
        }
        t.rows.push_back(std::move(row));
    }
    emit(csv_to_string(t), out_path);
    if (violation) {
        std::cerr << "bound VIOLATION detected\n";
        return 3;
    }
    return 0;
}

int run_synth_cmd(const std::string& profile, std::size_t n, double offset,
                  const std::optional<double>& dbr_target, double b_frac,
                  std::uint64_t seed, const std::string& out_path) {
    SynthConfig cfg;
    cfg.profile = parse_profile(profile);
    cfg.n = n;
    cfg.group_offset = offset;
    cfg.dbr_target = dbr_target;
    cfg.group_b_frac = b_frac;
    cfg.seed = seed;
    emit(csv_to_string(synth_to_csv(generate_synthetic(cfg))), out_path);
    return 0;
}

int run_oracle_cmd(const std::string& suite, int trials, std::uint64_t seed,
                   bool corrupt_bound) {
    struct Entry {
        const char* name;
        int default_trials;
        SuiteResult (*run)(int, std::uint64_t);
    };
    // prop2 takes the corrupt hook, so it is dispatched separately.
    const std::vector<Entry> entries = {
        {"prop1", 10000, run_prop1_suite},
        {"prop2", 1000, nullptr},
        {"prop3", 200, run_prop3_suite},
        {"prop4", 200, run_prop4_suite},
        {"prop5", 200, run_prop5_suite},
        {"prop6", 200, run_prop6_suite},
        {"lemma1", 1000, run_lemma1_suite},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        if (suite != "all" && suite != e.name) continue;
        const int n = trials > 0 ? trials : e.default_trials;
        const SuiteResult r = e.run ? e.run(n, seed)
                                    : run_prop2_suite(n, seed, corrupt_bound);
        std::cout << "suite " << r.name << ": " << (r.ok() ? "PASS" : "FAIL")
                  << " (cases=" << r.cases << ", failures=" << r.failures
                  << ")\n";
        for (const std::string& m : r.messages) std::cout << "  " << m << "\n";
        failures += r.failures;
    }
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fairmult: disparate-impact auditing with multiplicity bounds and "
        "brute-force verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // audit ----------------------------------------------------------------
    auto* audit = app.add_subcommand(
        "audit", "Compare aware and unaware models over random splits");
    CommonDataArgs audit_data;
    add_common_data_args(audit, audit_data, "--label-col", "Outcome column");
    AuditConfig audit_cfg;
    std::string audit_json, audit_csv;
    audit->add_option("--tau", audit_cfg.tau, "Classification threshold")
        ->capture_default_str();
    audit->add_option("--test-frac", audit_cfg.protocol.test_frac,
                      "Held-out fraction per split")
        ->capture_default_str();
    audit->add_option("--splits", audit_cfg.protocol.splits,
                      "Number of random splits")
        ->capture_default_str();
    audit->add_option("--seed", audit_cfg.protocol.seed, "Split/train seed")
        ->capture_default_str();
    audit->add_option("--eps-grid", audit_cfg.eps_grid,
                      "Accuracy budgets for multiplicity bounds on the full "
                      "dataset")
        ->delimiter(',');
    audit->add_option("--calibration-tol", audit_cfg.calibration_tol,
                      "Level-set deviation flagged as a calibration violation")
        ->capture_default_str();
    audit->add_option("--l2", audit_cfg.train.l2_penalty,
                      "L2 penalty for logistic training")
        ->capture_default_str();
    audit->add_option("--max-iters", audit_cfg.train.max_iters,
                      "Gradient-descent iteration cap")
        ->capture_default_str();
    audit->add_option("--json", audit_json,
                      "Write the JSON report here (default: stdout)");
    audit->add_option("--csv", audit_csv, "Write the per-split CSV here");

    // bounds ---------------------------------------------------------------
    auto* bounds = app.add_subcommand(
        "bounds", "Multiplicity-bound table over an accuracy-budget grid");
    std::string b_input, b_group, b_label, b_group_a, b_out;
    std::vector<std::string> b_features;
    std::vector<std::string> b_grid;
    bool b_oracle = false;
    int b_cap = 20;
    bounds->add_option("input", b_input, "Dataset CSV or distribution JSON")
        ->required();
    bounds->add_option("--group-col", b_group, "Protected-group column (CSV)");
    bounds->add_option("--label-col", b_label, "Outcome column (CSV)");
    bounds->add_option("--features", b_features, "Feature columns (CSV)")
        ->delimiter(',');
    bounds->add_option("--group-a", b_group_a, "Raw group value mapped to A");
    bounds->add_option("--eps-grid", b_grid, "Accuracy budgets")
        ->delimiter(',')
        ->required();
    bounds->add_flag("--oracle", b_oracle,
                     "Also compute the exhaustive maximum (point cap applies)");
    bounds->add_option("--cap", b_cap, "Point cap for the exhaustive oracle")
        ->capture_default_str();
    bounds->add_option("--out", b_out, "Write the table here (default: stdout)");

    // policy-eval ----------------------------------------------------------
    auto* policy = app.add_subcommand(
        "policy-eval",
        "Per-group below-threshold assignment rates, aware vs unaware");
    CommonDataArgs policy_data;
    add_common_data_args(policy, policy_data, "--target-col",
                         "Prediction target column");
    PolicyConfig policy_cfg;
    std::string policy_json, policy_csv;
    policy->add_option("--tau", policy_cfg.tau, "Assignment threshold")
        ->capture_default_str();
    policy->add_option("--test-frac", policy_cfg.protocol.test_frac,
                       "Held-out fraction per split")
        ->capture_default_str();
    policy->add_option("--splits", policy_cfg.protocol.splits,
                       "Number of random splits")
        ->capture_default_str();
    policy->add_option("--seed", policy_cfg.protocol.seed, "Split/train seed")
        ->capture_default_str();
    policy->add_option("--l2", policy_cfg.train.l2_penalty,
                       "L2 penalty for logistic training")
        ->capture_default_str();
    policy->add_option("--max-iters", policy_cfg.train.max_iters,
                       "Gradient-descent iteration cap")
        ->capture_default_str();
    policy->add_option("--json", policy_json,
                       "Write the JSON report here (default: stdout)");
    policy->add_option("--csv", policy_csv, "Write the summary table here");

    // synth ----------------------------------------------------------------
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic dataset with a group logit offset");
    std::string s_profile = "income-like", s_out;
    std::size_t s_n = 10000;
    double s_offset = 0.0, s_bfrac = -1.0;
    std::uint64_t s_seed = 1;
    std::optional<double> s_dbr;
    synth->add_option("--profile", s_profile, "Generator profile")
        ->check(CLI::IsMember({"income-like", "employment-like", "almp-like"}))
        ->capture_default_str();
    synth->add_option("--n", s_n, "Number of rows")->capture_default_str();
    synth->add_option("--group-offset", s_offset,
                      "Additive logit offset applied to group B")
        ->capture_default_str();
    synth->add_option("--dbr-target", s_dbr,
                      "Solve for the offset hitting this base-rate gap");
    synth->add_option("--group-b-frac", s_bfrac,
                      "Group-B fraction (default: profile-specific)");
    synth->add_option("--seed", s_seed, "Generator seed")->capture_default_str();
    synth->add_option("--out", s_out, "Write the CSV here (default: stdout)");

    // oracle-verify --------------------------------------------------------
    auto* oracle = app.add_subcommand(
        "oracle-verify", "Run a brute-force verification suite");
    std::string o_suite;
    int o_trials = -1;
    std::uint64_t o_seed = 1;
    bool o_corrupt = false;
    oracle->add_option("--suite", o_suite, "Suite name")
        ->check(CLI::IsMember({"prop1", "prop2", "prop3", "prop4", "prop5",
                               "prop6", "lemma1", "all"}))
        ->required();
    oracle->add_option("--trials", o_trials,
                       "Trial/instance count (default: per-suite)");
    oracle->add_option("--seed", o_seed, "Suite seed")->capture_default_str();
    oracle->add_flag("--corrupt-bound", o_corrupt,
                     "Self-test hook: corrupt the bound before checking")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (audit->parsed())
            return run_audit_cmd(audit_data, audit_cfg, audit_json, audit_csv);
        if (bounds->parsed())
            return run_bounds_cmd(b_input, b_group, b_label, b_features,
                                  b_group_a, b_grid, b_oracle, b_cap, b_out);
        if (policy->parsed())
            return run_policy_cmd(policy_data, policy_cfg, policy_json,
                                  policy_csv);
        if (synth->parsed())
            return run_synth_cmd(s_profile, s_n, s_offset, s_dbr, s_bfrac,
                                 s_seed, s_out);
        if (oracle->parsed())
            return run_oracle_cmd(o_suite, o_trials, o_seed, o_corrupt);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;  // unreachable with require_subcommand(1)
}
