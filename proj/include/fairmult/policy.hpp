#pragma once

#include <string>
#include <vector>

#include "fairmult/audit.hpp"

namespace fairmult {

// ---------------------------------------------------------------------------
// Policy evaluation: per-group assignment rates to the below-threshold
// stratum ("group C", score < tau) with means and deviations over random
// splits, aware vs unaware.
// ---------------------------------------------------------------------------

struct PolicyConfig {
    ModelMode mode = ModelMode::lr;
    double tau = 0.25;  // assignment threshold; tau = 1 puts everyone in C
    SplitProtocol protocol;
    TrainConfig train;  // lr mode
};

struct PolicySplitRow {
    std::size_t split_index = 0;
    double c_rate_a = 0.0;  // fraction of the group with score < tau
    double c_rate_b = 0.0;
    double delta = 0.0;  // |c_rate_b - c_rate_a|
    double auroc = 0.0;
};

struct PolicyVariant {
    std::vector<PolicySplitRow> splits;
    AggregateStat c_rate_a, c_rate_b, delta, auroc;
};

struct PolicyReport {
    std::string tool_version = kToolVersion;
    std::string dataset_path;  // caller-provided provenance
    std::string dataset_hash;
    std::string group_a_value;
    std::string group_b_value;
    std::vector<std::string> warnings;
    PolicyConfig config;
    std::size_t n_rows = 0;

    PolicyVariant aware;
    PolicyVariant unaware;
};

PolicyReport run_policy_lr(const RowDataset& data, const PolicyConfig& cfg);
PolicyReport run_policy_scores(const ScoreFile& aware, const ScoreFile& unaware,
                               const PolicyConfig& cfg);

// Byte-stable JSON document and the table-shaped CSV (one row per variant).
std::string policy_report_json(const PolicyReport& report);
CsvTable policy_summary_csv(const PolicyReport& report);

}  // namespace fairmult
