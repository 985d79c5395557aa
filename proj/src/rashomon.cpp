#include "fairmult/rashomon.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace fairmult {

namespace {

const Rat kHalf(1, 2);

// Flip probability per level for the budget-exhausting achiever: 1 below the
// budget margin, the fractional remainder at it, 0 above.
struct FlipPlan {
    std::vector<Rat> flip_prob;  // aligned with profile.levels
    Rat margin;                  // budget margin
    Rat spent;                   // accuracy actually spent (= effective budget)
    Rat mass_flipped;            // expected disagreement mass
};

FlipPlan plan_flips(const RashomonProfile& profile, const Rat& eps_eff) {
    FlipPlan plan;
    plan.flip_prob.assign(profile.levels.size(), Rat(0));
    plan.margin = margin_at_budget(profile, eps_eff);
    plan.spent = 0;
    plan.mass_flipped = 0;
    for (std::size_t i = 0; i < profile.levels.size(); ++i) {
        const ProfileLevel& lvl = profile.levels[i];
        if (lvl.margin < plan.margin) {
            plan.flip_prob[i] = 1;
            plan.spent += 2 * lvl.margin * lvl.mass;
            plan.mass_flipped += lvl.mass;
        } else if (lvl.margin == plan.margin) {
            if (lvl.margin == 0) {
                plan.flip_prob[i] = 1;  // free flips
                plan.mass_flipped += lvl.mass;
            } else {
                const Rat residual = eps_eff - lvl.flip_cost_below;
                const Rat q = residual / (2 * lvl.margin * lvl.mass);
                plan.flip_prob[i] = q;
                plan.spent += residual;
                plan.mass_flipped += q * lvl.mass;
            }
        }
    }
    return plan;
}

Classifier apply_plan(const RashomonProfile& profile, const FlipPlan& plan) {
    Classifier f = profile.bayes;
    bool randomized = false;
    for (std::size_t i = 0; i < profile.levels.size(); ++i) {
        const Rat& q = plan.flip_prob[i];
        if (q == 0) continue;
        if (q != 1) randomized = true;
        for (std::size_t idx : profile.levels[i].points) {
            const Rat& b = profile.bayes.values[idx];
            f.values[idx] = b + q * (1 - 2 * b);  // move q of the way to 1-b
        }
    }
    f.kind = randomized ? Classifier::Kind::randomized
                        : Classifier::Kind::deterministic;
    return f;
}

}  // namespace

RashomonProfile build_profile(std::shared_ptr<const EmpiricalDistribution> dist) {
    RashomonProfile profile;
    profile.dist = std::move(dist);
    const EmpiricalDistribution& d = *profile.dist;

    profile.bayes = bayes_classifier(d, Tie::one);
    profile.bayes_accuracy = accuracy(d, profile.bayes);
    profile.point_margin.reserve(d.size());

    std::map<Rat, ProfileLevel> by_margin;
    for (std::size_t i = 0; i < d.size(); ++i) {
        Rat margin = rat_abs(d[i].label_rate - kHalf);
        profile.point_margin.push_back(margin);
        ProfileLevel& lvl = by_margin[margin];
        lvl.margin = margin;
        lvl.mass += d[i].mass;
        lvl.points.push_back(i);
    }

    Rat cost = 0;
    for (auto& [margin, lvl] : by_margin) {
        lvl.flip_cost_below = cost;
        cost += 2 * margin * lvl.mass;
        profile.levels.push_back(std::move(lvl));
    }
    profile.total_flip_cost = cost;
    return profile;
}

RashomonProfile build_profile(const EmpiricalDistribution& dist) {
    return build_profile(std::make_shared<const EmpiricalDistribution>(dist));
}

Rat margin_at_budget(const RashomonProfile& profile, const Rat& eps) {
    if (eps < 0) throw std::invalid_argument("accuracy budget must be >= 0");
    Rat best = profile.levels.front().margin;  // flip_cost_below(min) = 0 <= eps
    for (const ProfileLevel& lvl : profile.levels)
        if (lvl.flip_cost_below <= eps) best = lvl.margin;
    return best;
}

BoundCertificate multiplicity_bound(const RashomonProfile& profile, const Rat& eps) {
    if (eps < 0) throw std::invalid_argument("accuracy budget must be >= 0");
    BoundCertificate cert;
    cert.epsilon = eps;
    cert.effective_epsilon = std::min(eps, profile.total_flip_cost);

    const FlipPlan plan = plan_flips(profile, cert.effective_epsilon);
    cert.margin = plan.margin;
    cert.bound = plan.mass_flipped;
    cert.achiever = apply_plan(profile, plan);
    cert.achieved_accuracy = accuracy(*profile.dist, cert.achiever);
    cert.achieved_disagreement =
        disagreement(*profile.dist, cert.achiever, profile.bayes);

    // The certificate's equalities are the point of the construction; any
    // mismatch is an internal bug, not an input problem.
    if (cert.achieved_accuracy !=
        profile.bayes_accuracy - cert.effective_epsilon)
        throw std::logic_error("bound achiever accuracy mismatch");
    if (cert.achieved_disagreement != cert.bound)
        throw std::logic_error("bound achiever disagreement mismatch");
    return cert;
}

Rat legacy_bound(const RashomonProfile& profile, const Rat& eps) {
    if (eps < 0) throw std::invalid_argument("accuracy budget must be >= 0");
    const Rat c = profile.levels.front().margin;
    if (c == 0)
        throw std::invalid_argument(
            "legacy bound needs every margin bounded away from 0");
    return eps / (2 * c);
}

Rat two_model_bound(const RashomonProfile& profile, const Rat& eps, const Rat& delta) {
    if (delta < 0) throw std::invalid_argument("delta must be >= 0");
    return multiplicity_bound(profile, eps + delta).bound;
}

Rat di_difference_bound(const EmpiricalDistribution& dist, const Classifier& f,
                        const Classifier& g) {
    const Rat min_mass =
        std::min(dist.group_mass(Group::A), dist.group_mass(Group::B));
    if (min_mass == 0)
        throw std::invalid_argument("both groups need positive mass");
    return disagreement(dist, f, g) / min_mass;
}

namespace {

// D4-style derandomization: flip whole levels below the budget margin, then
// flip points at the margin level in index order while the budget allows a
// full point.  Undershoots the randomized bound by at most one point.
Classifier derandomized_achiever(const RashomonProfile& profile, const Rat& budget) {
    const Rat eps_eff = std::min(budget, profile.total_flip_cost);
    const Rat margin = margin_at_budget(profile, eps_eff);
    Classifier h = profile.bayes;
    for (const ProfileLevel& lvl : profile.levels) {
        if (lvl.margin > margin) break;
        if (lvl.margin < margin || lvl.margin == 0) {
            for (std::size_t idx : lvl.points)
                h.values[idx] = 1 - h.values[idx];
        } else {
            Rat residual = eps_eff - lvl.flip_cost_below;
            std::vector<std::size_t> order = lvl.points;
            std::sort(order.begin(), order.end());
            for (std::size_t idx : order) {
                const Rat cost = 2 * lvl.margin * (*profile.dist)[idx].mass;
                if (cost > residual) break;
                residual -= cost;
                h.values[idx] = 1 - h.values[idx];
            }
        }
    }
    return h;
}

struct Candidate {
    Classifier g;
    Rat di_g;
    Rat acc_g;
};

// The two one-sided pushes over U = {H != Bayes}: `raise_a` turns A-side
// zeros of F into ones and B-side ones into zeros; the mirror swaps roles.
Candidate push_candidate(const EmpiricalDistribution& dist, const Classifier& f,
                         const Classifier& h, const Classifier& bayes,
                         bool raise_a) {
    Candidate c;
    c.g = f;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (h.values[i] == bayes.values[i]) continue;  // not in U
        const bool in_a = dist[i].group == Group::A;
        const bool raise = raise_a ? in_a : !in_a;
        if (raise && f.values[i] == 0)
            c.g.values[i] = 1;
        else if (!raise && f.values[i] == 1)
            c.g.values[i] = 0;
    }
    c.di_g = disparate_impact(dist, c.g);
    c.acc_g = accuracy(dist, c.g);
    return c;
}

}  // namespace

UnawareDiCertificate unaware_achievable_di(const EmpiricalDistribution& dist,
                                           const Classifier& f, const Rat& eps) {
    if (eps <= 0) throw std::invalid_argument("eps must be positive");

    const RashomonProfile profile = build_profile(dist);
    const Rat acc_f = accuracy(dist, f);
    const Rat delta = profile.bayes_accuracy - acc_f;
    const Rat di_f = disparate_impact(dist, f);
    const Rat max_mass =
        std::max(dist.group_mass(Group::A), dist.group_mass(Group::B));

    UnawareDiCertificate cert;
    cert.di_f = di_f;
    cert.fallback = false;

    // A candidate qualifies if it stays within eps of F's accuracy and moves
    // DI by at least the advertised share of d(H, Bayes).
    auto attempt = [&](const Rat& budget) -> bool {
        const Classifier h = derandomized_achiever(profile, budget);
        const Rat d_h = disagreement(dist, h, profile.bayes);
        const Rat lb = d_h / (2 * max_mass);
        const Candidate raise_a =
            push_candidate(dist, f, h, profile.bayes, true);
        const Candidate raise_b =
            push_candidate(dist, f, h, profile.bayes, false);
        const Candidate* best = nullptr;
        for (const Candidate* c : {&raise_a, &raise_b}) {
            if (c->acc_g < acc_f - eps) continue;
            if (rat_abs(di_f - c->di_g) < lb) continue;
            if (!best || rat_abs(di_f - c->di_g) > rat_abs(di_f - best->di_g))
                best = c;
        }
        if (!best) return false;
        cert.g = best->g;
        cert.di_g = best->di_g;
        cert.di_change_abs = rat_abs(di_f - best->di_g);
        cert.h = h;
        cert.d_h_bayes = d_h;
        cert.lower_bound = lb;
        cert.budget_used = budget;
        return true;
    };

    // Generous budget first (F's own suboptimality extends the reach); the
    // eps-only budget is the provable fallback: its flip set costs at most
    // eps, so both pushes stay within eps of F and one of them always moves
    // DI by d(H,Bayes)/(2*max mass).
    if (attempt(eps + delta)) return cert;
    cert.fallback = true;
    if (!attempt(eps))
        throw std::logic_error("unaware DI construction failed its guarantee");
    return cert;
}

}  // namespace fairmult
