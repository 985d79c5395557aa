#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairmult/empdist.hpp"

namespace fairmult {

// Comma-separated, UTF-8, '.' decimal point, header row required.  Lines
// starting with '#' are collected as comments (the synthetic generator
// stores its parameters there).

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;  // without the leading '#'

    std::size_t column(const std::string& name) const;  // DataError if absent
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);
std::string csv_to_string(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// ---------------------------------------------------------------------------
// Dataset ingestion
// ---------------------------------------------------------------------------

struct IngestConfig {
    std::string group_col;
    std::string label_col;
    std::vector<std::string> feature_cols;       // empty = all remaining columns
    std::optional<std::string> group_a_value;    // override the base-rate heuristic
};

struct IngestResult {
    RowDataset data;
    std::string group_a_value;  // raw column value mapped to group A
    std::string group_b_value;
    std::vector<std::string> warnings;
};

// Group and label columns accept {0,1} or two distinct strings.  Group A is
// the higher-base-rate value unless overridden; a warning (not an error) is
// recorded when the override leaves A with the lower base rate.  String
// labels map to 0/1 by first occurrence.
IngestResult ingest(const CsvTable& table, const IngestConfig& cfg);

// ---------------------------------------------------------------------------
// Score files: columns (row_id, group, score, label)
// ---------------------------------------------------------------------------

struct ScoreRow {
    std::string row_id;
    Group group;
    double score;
    int label;
};

struct ScoreFile {
    std::vector<ScoreRow> rows;
    std::string group_a_value;
    std::string group_b_value;
    std::vector<std::string> warnings;
};

ScoreFile read_scores(const std::string& path,
                      const std::optional<std::string>& group_a_value = {});

// Exact distribution files: JSON with per-point id/mass/label_rate/group,
// rationals as strings.
EmpiricalDistribution read_dist_json(const std::string& path);
void write_dist_json(const std::string& path, const EmpiricalDistribution& dist);

}  // namespace fairmult
