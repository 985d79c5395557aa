#include "fairmult/metrics.hpp"

#include <algorithm>
#include <map>

#include "fairmult/errors.hpp"

namespace fairmult {

namespace {

void require_total(const EmpiricalDistribution& dist, std::size_t got,
                   const char* what) {
    if (got != dist.size())
        throw std::invalid_argument(std::string(what) +
                                    " not total on the distribution");
}

}  // namespace

Classifier Classifier::det(std::vector<int> bits) {
    Classifier f;
    f.kind = Kind::deterministic;
    f.values.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1)
            throw std::invalid_argument("deterministic classifier bit outside {0,1}");
        f.values.emplace_back(b);
    }
    return f;
}

Classifier constant_classifier(std::size_t n, int value) {
    return Classifier::det(std::vector<int>(n, value));
}

Classifier complement(const Classifier& f) {
    Classifier g = f;
    for (Rat& v : g.values) v = 1 - v;
    return g;
}

Classifier threshold(const Predictor& pred, const Rat& tau) {
    if (tau <= 0 || tau >= 1)
        throw std::invalid_argument("threshold must lie in (0,1)");
    Classifier f;
    f.kind = Classifier::Kind::deterministic;
    f.values.reserve(pred.values.size());
    for (const Rat& v : pred.values) f.values.emplace_back(v >= tau ? 1 : 0);
    return f;
}

Classifier bayes_classifier(const EmpiricalDistribution& dist, Tie tie) {
    const Rat half = rat_frac(1, 2);
    Classifier f;
    f.kind = Classifier::Kind::deterministic;
    f.values.reserve(dist.size());
    for (const PointRecord& p : dist.points()) {
        if (p.label_rate > half)
            f.values.emplace_back(1);
        else if (p.label_rate < half)
            f.values.emplace_back(0);
        else
            f.values.emplace_back(tie == Tie::one ? 1 : 0);
    }
    return f;
}

Rat accuracy(const EmpiricalDistribution& dist, const Classifier& f) {
    require_total(dist, f.values.size(), "classifier");
    Rat acc = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const PointRecord& p = dist[i];
        acc += p.mass * (f.values[i] * p.label_rate +
                         (1 - f.values[i]) * (1 - p.label_rate));
    }
    return acc;
}

Rat disagreement(const EmpiricalDistribution& dist, const Classifier& f,
                 const Classifier& g) {
    require_total(dist, f.values.size(), "classifier");
    require_total(dist, g.values.size(), "classifier");
    Rat d = 0;
    for (std::size_t i = 0; i < dist.size(); ++i)
        d += dist[i].mass * rat_abs(f.values[i] - g.values[i]);
    return d;
}

Rat positive_rate(const EmpiricalDistribution& dist, const Classifier& f, Group g) {
    require_total(dist, f.values.size(), "classifier");
    Rat mass = 0, pos = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i].group != g) continue;
        mass += dist[i].mass;
        pos += dist[i].mass * f.values[i];
    }
    if (mass == 0)
        throw DataError(std::string("group ") + group_name(g) + " has zero mass");
    return pos / mass;
}

Rat disparate_impact(const EmpiricalDistribution& dist, const Classifier& f) {
    return positive_rate(dist, f, Group::A) - positive_rate(dist, f, Group::B);
}

Rat abs_disparate_impact(const EmpiricalDistribution& dist, const Classifier& f) {
    return rat_abs(disparate_impact(dist, f));
}

Rat dbr(const EmpiricalDistribution& dist) {
    return dist.base_rate(Group::A) - dist.base_rate(Group::B);
}

CalibrationReport check_calibration(const EmpiricalDistribution& dist,
                                    const Predictor& pred, CalibScope scope,
                                    const Rat& tol) {
    require_total(dist, pred.values.size(), "predictor");
    CalibrationReport report;

    auto scan = [&](std::optional<Group> g) {
        struct Cell {
            Rat mass, labels;
        };
        std::map<Rat, Cell> level_sets;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (g && dist[i].group != *g) continue;
            Cell& c = level_sets[pred.values[i]];
            c.mass += dist[i].mass;
            c.labels += dist[i].mass * dist[i].label_rate;
        }
        for (const auto& [score, cell] : level_sets) {
            if (cell.mass == 0) continue;
            Rat dev = cell.labels / cell.mass - score;
            if (rat_abs(dev) > tol)
                report.violations.push_back(
                    CalibrationViolation{scope, g, score, dev});
        }
    };

    if (scope == CalibScope::global) {
        scan(std::nullopt);
    } else {
        scan(Group::A);
        scan(Group::B);
    }
    return report;
}

Rat PredictionDistribution::mean(Group g) const {
    Rat m = 0;
    for (const ScoreAtom& atom : atoms(g)) m += atom.score * atom.mass;
    return m;
}

Rat PredictionDistribution::positive_mass(Group g, const Rat& tau) const {
    Rat m = 0;
    for (const ScoreAtom& atom : atoms(g))
        if (atom.score >= tau) m += atom.mass;
    return m;
}

PredictionDistribution prediction_distributions(const EmpiricalDistribution& dist,
                                                const Predictor& pred) {
    require_total(dist, pred.values.size(), "predictor");
    PredictionDistribution pd;
    for (Group g : {Group::A, Group::B}) {
        std::map<Rat, Rat> atoms;
        Rat mass = 0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist[i].group != g) continue;
            atoms[pred.values[i]] += dist[i].mass;
            mass += dist[i].mass;
        }
        if (mass == 0)
            throw DataError(std::string("group ") + group_name(g) + " has zero mass");
        auto& out = g == Group::A ? pd.a : pd.b;
        for (const auto& [score, m] : atoms)
            out.push_back(ScoreAtom{score, m / mass});
    }
    return pd;
}

RateDominance check_rate_dominance(const PredictionDistribution& pd, const Rat& tau) {
    // Merge the two supports so absent scores count as zero mass.
    std::map<Rat, std::pair<Rat, Rat>> merged;  // score -> (P_A, P_B)
    for (const ScoreAtom& atom : pd.a) merged[atom.score].first = atom.mass;
    for (const ScoreAtom& atom : pd.b) merged[atom.score].second = atom.mass;

    bool strict = true;
    Rat high_a = 0, high_b = 0;  // (1-v)-weighted mass at v >= tau
    Rat low_a = 0, low_b = 0;    // v-weighted mass at v < tau
    for (const auto& [v, masses] : merged) {
        const auto& [ma, mb] = masses;
        if (v >= tau) {
            if (mb < ma) strict = false;
            high_a += ma * (1 - v);
            high_b += mb * (1 - v);
        } else {
            if (ma < mb) strict = false;
            low_a += ma * v;
            low_b += mb * v;
        }
    }
    if (strict) return RateDominance::strict_holds;
    if (high_b >= high_a && low_a >= low_b) return RateDominance::relaxed_holds;
    return RateDominance::neither;
}

double auroc(const std::vector<std::pair<double, int>>& scored) {
    long npos = 0, nneg = 0;
    for (const auto& [score, label] : scored) {
        if (label != 0 && label != 1) throw DataError("AUROC labels must be 0/1");
        (label ? npos : nneg) += 1;
    }
    if (npos == 0 || nneg == 0)
        throw DataError("AUROC needs both a positive and a negative example");

    std::vector<std::pair<double, int>> sorted = scored;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    // Sweep score groups: each positive beats all strictly-lower negatives
    // and half-ties with equal-score negatives.
    double wins = 0.0;
    long neg_below = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        long tie_pos = 0, tie_neg = 0;
        while (j < sorted.size() && sorted[j].first == sorted[i].first) {
            (sorted[j].second ? tie_pos : tie_neg) += 1;
            ++j;
        }
        wins += static_cast<double>(tie_pos) *
                (static_cast<double>(neg_below) + 0.5 * static_cast<double>(tie_neg));
        neg_below += tie_neg;
        i = j;
    }
    return wins / (static_cast<double>(npos) * static_cast<double>(nneg));
}

}  // namespace fairmult
