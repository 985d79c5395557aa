#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairmult/rational.hpp"

namespace fairmult {

enum class Group { A, B };

inline const char* group_name(Group g) { return g == Group::A ? "A" : "B"; }

// One atom of the input space: mass mu({x}), conditional label rate
// p(x) = P(Y=1 | X=x), and the protected-group tag.
struct PointRecord {
    std::string id;
    Rat mass;
    Rat label_rate;
    Group group;
};

// Finite weighted input space.  Immutable after construction; every exact
// computation in the library runs against one of these.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<PointRecord> points);

    std::size_t size() const { return points_.size(); }
    const PointRecord& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<PointRecord>& points() const { return points_; }

    // Index lookup by id; throws DataError if absent.
    std::size_t index_of(const std::string& id) const;

    Rat group_mass(Group g) const;
    // Mass-weighted mean label rate; whole space or one group (which must
    // have positive mass).
    Rat base_rate() const;
    Rat base_rate(Group g) const;

private:
    std::vector<PointRecord> points_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Row-level carrier for training and ingestion.  Feature vectors exclude the
// group column; the trainer appends it itself when fitting an aware model.
struct RowDataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> features;  // one vector per row
    std::vector<Group> group;
    std::vector<int> label;  // 0/1

    std::size_t n_rows() const { return features.size(); }
    std::size_t n_features() const { return feature_names.size(); }
    void validate() const;  // arity / binary-label / finiteness checks
};

// Row aggregation: rows identical in (features, group) collapse into one
// point with mass = count/total and label_rate = positive fraction.  Points
// are emitted in canonical order (lexicographic by features, then group), so
// the result is independent of row order.
struct Aggregation {
    EmpiricalDistribution dist;
    std::vector<std::size_t> point_of_row;           // row -> point index
    std::vector<std::vector<double>> point_features; // point index -> features
};

Aggregation aggregate_rows(const RowDataset& data);
EmpiricalDistribution from_rows(const RowDataset& data);

}  // namespace fairmult
