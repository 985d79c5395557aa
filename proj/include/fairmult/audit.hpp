#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairmult/csvio.hpp"
#include "fairmult/empdist.hpp"
#include "fairmult/logreg.hpp"

namespace fairmult {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Provenance and split plumbing (shared with policy evaluation)
// ---------------------------------------------------------------------------

// FNV-1a, 64-bit, over raw bytes.
std::uint64_t fnv1a64(const std::string& bytes);
std::string file_hash(const std::string& path);  // "fnv1a64:<16 hex digits>"

// FAIRMULT_THREADS (>= 1) if set, else hardware concurrency.
std::size_t worker_count();

// Runs fn(0..splits-1) across workers; results must be written into
// per-split slots.  Rethrows the first worker exception.
void parallel_splits(std::size_t splits,
                     const std::function<void(std::size_t)>& fn);

// Deterministic uniform train/test split.  Depends only on the arguments,
// never on scheduling; test size is clamped so both sides are nonempty.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
SplitIndices split_rows(std::size_t n_rows, double test_frac,
                        std::uint64_t seed, std::size_t split_index);

RowDataset subset_rows(const RowDataset& data,
                       const std::vector<std::size_t>& rows);

struct SplitProtocol {
    std::size_t splits = 10;
    double test_frac = 0.3;
    std::uint64_t seed = 1;
};

struct AggregateStat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single value
};
AggregateStat aggregate(const std::vector<double>& xs);

enum class ModelMode { lr, scores };
const char* model_mode_name(ModelMode m);

// Score files joined by row_id: both files must cover the same ids with
// matching group and label.  Row order follows the aware file.
struct JoinedScoreRow {
    Group group;
    int label;
    double aware_score;
    double unaware_score;
};
std::vector<JoinedScoreRow> join_scores(const ScoreFile& aware,
                                        const ScoreFile& unaware);

// ---------------------------------------------------------------------------
// Audit: aware vs unaware comparison over k random train/test splits
// ---------------------------------------------------------------------------

struct AuditConfig {
    ModelMode mode = ModelMode::lr;
    double tau = 0.5;
    SplitProtocol protocol;
    TrainConfig train;              // lr mode
    double calibration_tol = 0.05;  // flag level-set deviations beyond this
    std::vector<double> eps_grid;   // multiplicity bounds on the full dataset
};

// Group-calibration summary of one variant on one test split.  Continuous
// scores are folded into 100 equal-width bins (midpoint representative)
// before the level-set comparison; everything else in the audit uses exact
// score atoms.
struct CalibrationSummary {
    std::size_t levels = 0;      // per-group level sets examined
    std::size_t violations = 0;  // |E[p | f=v] - v| > tol
    double max_abs_deviation = 0.0;
};

// One model variant evaluated on one test split.
struct VariantMetrics {
    double accuracy = 0.0;
    double auroc = 0.0;
    double di_signed = 0.0;  // rate(A) - rate(B)
    double di_abs = 0.0;
    double rate_a = 0.0;
    double rate_b = 0.0;
    CalibrationSummary calibration;
};

struct SplitAudit {
    std::size_t split_index = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double dbr_test = 0.0;  // base-rate gap of the test split
    VariantMetrics aware;
    VariantMetrics unaware;
    std::optional<ZeroPaReport> zero_pa;  // lr mode: aware-model flip analysis
    std::optional<double> aware_pa_coef;
    double rel_reduction_di_abs = 0.0;  // (aware - unaware) / aware
    double rel_reduction_accuracy = 0.0;
};

// Multiplicity-bound row for one grid epsilon, computed on the aggregation
// of the whole dataset (lr mode: all feature rows; scores mode: the aware
// score atoms).
struct BoundRow {
    double epsilon = 0.0;
    double margin = 0.0;
    double bound = 0.0;
    std::optional<double> legacy;  // absent when a zero margin blocks it
};

// Raw-unit decision boundary per group for a single-feature aware model:
// sigma(w x + b + c_G [B]) = tau at x = (logit(tau) - b - c_G [B]) / w.
struct SingleFeatureCut {
    std::string feature;
    double threshold_a = 0.0;
    double threshold_b = 0.0;
};

struct AuditReport {
    std::string tool_version = kToolVersion;
    std::string dataset_path;  // caller-provided provenance
    std::string dataset_hash;
    std::string group_a_value;
    std::string group_b_value;
    std::vector<std::string> warnings;
    AuditConfig config;
    std::size_t n_rows = 0;

    std::vector<SplitAudit> splits;

    AggregateStat aware_accuracy, unaware_accuracy;
    AggregateStat aware_di_abs, unaware_di_abs;
    AggregateStat aware_auroc, unaware_auroc;
    double rel_reduction_di_abs = 0.0;  // on the split means
    double rel_reduction_accuracy = 0.0;
    std::size_t splits_with_lower_unaware_di = 0;

    std::optional<SingleFeatureCut> single_feature;  // split-0 aware model
    std::string aware_model_text;                    // split-0 serializations
    std::string unaware_model_text;
    std::vector<BoundRow> bounds;
};

// Trains aware/unaware logistic models per split and compares them on the
// held-out rows.  Provenance fields (path, hash, group values, ingest
// warnings) are the caller's to fill.
AuditReport run_audit_lr(const RowDataset& data, const AuditConfig& cfg);

// Same comparison with fixed scores from two files.
AuditReport run_audit_scores(const ScoreFile& aware, const ScoreFile& unaware,
                             const AuditConfig& cfg);

// Byte-stable JSON document and the per-split plot-ready CSV summary.
std::string audit_report_json(const AuditReport& report);
CsvTable audit_summary_csv(const AuditReport& report);

}  // namespace fairmult
