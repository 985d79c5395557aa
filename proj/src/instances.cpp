#include "fairmult/instances.hpp"

#include <algorithm>
#include <numeric>

#include "fairmult/rashomon.hpp"

namespace fairmult {

namespace {

// Integer weights 1..9 normalized by their sum: positive masses, exact total 1.
std::vector<Rat> random_masses(Rng& rng, std::size_t n) {
    std::vector<long> w(n);
    long total = 0;
    for (long& x : w) {
        x = static_cast<long>(rng.uniform_int(1, 9));
        total += x;
    }
    std::vector<Rat> masses;
    masses.reserve(n);
    for (long x : w) masses.emplace_back(rat_frac(x, total));
    return masses;
}

}  // namespace

EmpiricalDistribution random_distribution(Rng& rng, int max_points,
                                          int rate_denom) {
    const int n = static_cast<int>(rng.uniform_int(2, max_points));
    const std::vector<Rat> masses = random_masses(rng, n);
    std::vector<PointRecord> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
        // First two points pin one member per group.
        Group g = i == 0   ? Group::A
                  : i == 1 ? Group::B
                           : (rng.bernoulli(0.5) ? Group::A : Group::B);
        Rat rate = rat_frac(rng.uniform_int(0, rate_denom), rate_denom);
        points.push_back(
            PointRecord{"x" + std::to_string(i + 1), masses[i], rate, g});
    }
    return EmpiricalDistribution(std::move(points));
}

Classifier random_classifier(Rng& rng, std::size_t n) {
    std::vector<int> bits(n);
    for (int& b : bits) b = rng.bernoulli(0.5) ? 1 : 0;
    return Classifier::det(std::move(bits));
}

SiblingInstance random_sibling_instance(Rng& rng, int max_pairs, int rate_denom) {
    const int pairs = static_cast<int>(rng.uniform_int(1, max_pairs));
    const int singles = static_cast<int>(rng.uniform_int(0, 2));
    const std::size_t n = 2 * pairs + singles;

    const std::vector<Rat> masses = random_masses(rng, n);
    std::vector<PointRecord> points;
    std::vector<std::size_t> partner(n, SiblingInstance::npos);
    std::vector<int> bits(n);
    std::size_t idx = 0;
    for (int p = 0; p < pairs; ++p) {
        const int shared = rng.bernoulli(0.5) ? 1 : 0;
        for (Group g : {Group::A, Group::B}) {
            Rat rate = rat_frac(rng.uniform_int(0, rate_denom), rate_denom);
            points.push_back(PointRecord{"x" + std::to_string(idx + 1),
                                         masses[idx], rate, g});
            bits[idx] = shared;
            ++idx;
        }
        partner[idx - 2] = idx - 1;
        partner[idx - 1] = idx - 2;
    }
    for (int s = 0; s < singles; ++s) {
        Group g = rng.bernoulli(0.5) ? Group::A : Group::B;
        Rat rate = rat_frac(rng.uniform_int(0, rate_denom), rate_denom);
        points.push_back(
            PointRecord{"x" + std::to_string(idx + 1), masses[idx], rate, g});
        bits[idx] = rng.bernoulli(0.5) ? 1 : 0;
        ++idx;
    }

    SiblingInstance inst{EmpiricalDistribution(std::move(points)),
                         Classifier::det(std::move(bits)), std::move(partner)};
    return inst;
}

PredictionDistribution random_prediction_distribution(Rng& rng, int max_atoms,
                                                      int score_denom) {
    PredictionDistribution pd;
    for (auto* side : {&pd.a, &pd.b}) {
        const int k = static_cast<int>(rng.uniform_int(1, max_atoms));
        // Distinct scores on the closed grid 0..score_denom.
        std::vector<int> grid(score_denom + 1);
        std::iota(grid.begin(), grid.end(), 0);
        rng.shuffle(grid);
        std::vector<int> chosen(grid.begin(), grid.begin() + k);
        std::sort(chosen.begin(), chosen.end());
        const std::vector<Rat> masses = random_masses(rng, k);
        for (int i = 0; i < k; ++i)
            side->push_back(ScoreAtom{rat_frac(chosen[i], score_denom), masses[i]});
    }
    return pd;
}

std::vector<Rat> epsilon_grid(const RashomonProfile& profile) {
    std::vector<Rat> grid;
    grid.emplace_back(0);
    for (const ProfileLevel& lvl : profile.levels)
        grid.push_back(lvl.flip_cost_below);
    grid.push_back(profile.total_flip_cost);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Rat> out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.push_back(grid[i]);
        if (i + 1 < grid.size()) out.push_back((grid[i] + grid[i + 1]) / 2);
    }
    out.push_back(profile.total_flip_cost * rat_frac(9, 8));  // beyond-total probe
    return out;
}

}  // namespace fairmult
