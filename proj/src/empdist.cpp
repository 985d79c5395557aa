#include "fairmult/empdist.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fairmult/errors.hpp"

namespace fairmult {

EmpiricalDistribution::EmpiricalDistribution(std::vector<PointRecord> points)
    : points_(std::move(points)) {
    if (points_.empty()) throw DataError("distribution has no points");
    Rat total = 0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const PointRecord& p = points_[i];
        if (p.mass <= 0) throw DataError("point '" + p.id + "' has non-positive mass");
        if (p.label_rate < 0 || p.label_rate > 1)
            throw DataError("point '" + p.id + "' has label rate outside [0,1]");
        if (!index_.emplace(p.id, i).second)
            throw DataError("duplicate point id '" + p.id + "'");
        total += p.mass;
    }
    if (total != 1)
        throw DataError("point masses sum to " + rat_to_string(total) + ", expected 1");
}

std::size_t EmpiricalDistribution::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("unknown point id '" + id + "'");
    return it->second;
}

Rat EmpiricalDistribution::group_mass(Group g) const {
    Rat total = 0;
    for (const PointRecord& p : points_)
        if (p.group == g) total += p.mass;
    return total;
}

Rat EmpiricalDistribution::base_rate() const {
    Rat total = 0;
    for (const PointRecord& p : points_) total += p.mass * p.label_rate;
    return total;
}

Rat EmpiricalDistribution::base_rate(Group g) const {
    Rat mass = 0, labels = 0;
    for (const PointRecord& p : points_) {
        if (p.group != g) continue;
        mass += p.mass;
        labels += p.mass * p.label_rate;
    }
    if (mass == 0)
        throw DataError(std::string("group ") + group_name(g) + " has zero mass");
    return labels / mass;
}

void RowDataset::validate() const {
    if (features.empty()) throw DataError("dataset has no rows");
    if (features.size() != group.size() || features.size() != label.size())
        throw DataError("row/group/label counts differ");
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != feature_names.size())
            throw DataError("row " + std::to_string(i) + " has wrong feature arity");
        for (double v : features[i])
            if (!std::isfinite(v))
                throw DataError("row " + std::to_string(i) + " has a non-finite feature");
        if (label[i] != 0 && label[i] != 1)
            throw DataError("row " + std::to_string(i) + " has a non-binary label");
    }
}

Aggregation aggregate_rows(const RowDataset& data) {
    data.validate();

    // Identity of a point is (features, group); rows that differ only in the
    // label merge.  std::map keys give the canonical point order.
    using Key = std::pair<std::vector<double>, int>;
    struct Cell {
        long count = 0;
        long positives = 0;
    };
    std::map<Key, Cell> cells;
    std::vector<std::map<Key, Cell>::iterator> row_cell(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        Key k{data.features[i], data.group[i] == Group::B ? 1 : 0};
        auto it = cells.emplace(std::move(k), Cell{}).first;
        it->second.count += 1;
        it->second.positives += data.label[i];
        row_cell[i] = it;
    }

    const long total = static_cast<long>(data.n_rows());
    std::vector<PointRecord> points;
    std::vector<std::vector<double>> feats;
    points.reserve(cells.size());
    feats.reserve(cells.size());
    std::map<Key, Cell>::iterator it = cells.begin();
    std::unordered_map<const Cell*, std::size_t> cell_index;
    for (std::size_t idx = 0; it != cells.end(); ++it, ++idx) {
        const Cell& c = it->second;
        points.push_back(PointRecord{
            "x" + std::to_string(idx + 1),
            rat_frac(c.count, total),
            rat_frac(c.positives, c.count),
            it->first.second ? Group::B : Group::A,
        });
        feats.push_back(it->first.first);
        cell_index[&c] = idx;
    }

    std::vector<std::size_t> point_of_row(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        point_of_row[i] = cell_index.at(&row_cell[i]->second);

    return Aggregation{EmpiricalDistribution(std::move(points)),
                       std::move(point_of_row), std::move(feats)};
}

EmpiricalDistribution from_rows(const RowDataset& data) {
    return aggregate_rows(data).dist;
}

}  // namespace fairmult
