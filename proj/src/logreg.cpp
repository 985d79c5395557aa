#include "fairmult/logreg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fairmult/errors.hpp"

namespace fairmult {

double sigmoid(double z) {
    // Split to avoid overflow in exp for large |z|.
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("logit needs p in (0,1)");
    return std::log(p / (1.0 - p));
}

double LRModel::pa_coef() const {
    if (!pa_index) throw std::invalid_argument("model has no protected-attribute term");
    return coefficients[*pa_index];
}

LossGrad logistic_loss_grad(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels,
                            const std::vector<double>& w, double l2_penalty) {
    const std::size_t n = rows.size();
    const std::size_t d = w.size() - 1;
    LossGrad out;
    out.loss = 0.0;
    out.grad.assign(w.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = w[0];
        for (std::size_t j = 0; j < d; ++j) z += w[j + 1] * rows[i][j];
        // log(1+e^z) - y*z, with the stable split by sign of z.
        const double softplus =
            z >= 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        out.loss += softplus - labels[i] * z;
        const double resid = sigmoid(z) - labels[i];
        out.grad[0] += resid;
        for (std::size_t j = 0; j < d; ++j) out.grad[j + 1] += resid * rows[i][j];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.loss *= inv_n;
    for (double& g : out.grad) g *= inv_n;
    if (l2_penalty > 0) {
        for (std::size_t j = 1; j < w.size(); ++j) {
            out.loss += 0.5 * l2_penalty * w[j] * w[j];
            out.grad[j] += l2_penalty * w[j];
        }
    }
    return out;
}

namespace {

bool is_binary_column(const std::vector<std::vector<double>>& rows, std::size_t j) {
    for (const auto& r : rows)
        if (r[j] != 0.0 && r[j] != 1.0) return false;
    return true;
}

}  // namespace

LRModel train(const RowDataset& data, bool aware, const TrainConfig& cfg,
              const std::string& pa_feature_name) {
    data.validate();
    if (cfg.learning_rate <= 0) throw std::invalid_argument("learning rate must be positive");
    if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");

    // Working copy of the design matrix, group column appended when aware.
    std::vector<std::vector<double>> rows(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        rows[i] = data.features[i];
        if (aware) rows[i].push_back(data.group[i] == Group::B ? 1.0 : 0.0);
    }
    std::vector<std::string> names = data.feature_names;
    if (aware) names.push_back(pa_feature_name);
    const std::size_t d = names.size();

    // Standardize continuous columns; remember the affine map to undo it.
    std::vector<double> shift(d, 0.0), scale(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (is_binary_column(rows, j)) continue;
        double mean = 0.0;
        for (const auto& r : rows) mean += r[j];
        mean /= static_cast<double>(rows.size());
        double var = 0.0;
        for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
        var /= static_cast<double>(rows.size());
        const double sd = std::sqrt(var);
        shift[j] = mean;
        scale[j] = sd > 0 ? sd : 1.0;
    }
    for (auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) r[j] = (r[j] - shift[j]) / scale[j];

    // Full-batch descent with backtracking halving; the accepted-loss trace
    // is non-increasing by construction.
    std::vector<double> w(d + 1, 0.0);
    LossGrad cur = logistic_loss_grad(rows, data.label, w, cfg.l2_penalty);
    double step = cfg.learning_rate;
    bool converged = false;
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        double gmax = 0.0;
        for (double g : cur.grad) gmax = std::max(gmax, std::fabs(g));
        if (gmax < cfg.convergence_tol) {
            converged = true;
            break;
        }
        std::vector<double> cand(w.size());
        LossGrad next;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t k = 0; k < w.size(); ++k)
                cand[k] = w[k] - step * cur.grad[k];
            next = logistic_loss_grad(rows, data.label, cand, cfg.l2_penalty);
            if (next.loss <= cur.loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflowed; report non-convergence
        w = cand;
        cur = next;
        step *= 1.25;  // recover after conservative halvings
    }

    LRModel model;
    model.feature_names = std::move(names);
    model.std_intercept = w[0];
    model.std_coefficients.assign(w.begin() + 1, w.end());
    model.coefficients.resize(d);
    model.intercept = w[0];
    for (std::size_t j = 0; j < d; ++j) {
        model.coefficients[j] = model.std_coefficients[j] / scale[j];
        model.intercept -= model.std_coefficients[j] * shift[j] / scale[j];
    }
    if (aware) model.pa_index = d - 1;
    model.converged = converged;
    model.iterations = iter;
    model.final_loss = cur.loss;
    return model;
}

namespace {

double features_logit(const LRModel& model, const std::vector<double>& feats,
                      Group g) {
    const std::size_t n_plain =
        model.coefficients.size() - (model.pa_index ? 1 : 0);
    if (feats.size() != n_plain)
        throw DataError("feature arity does not match the model");
    double z = model.intercept;
    for (std::size_t j = 0; j < n_plain; ++j) z += model.coefficients[j] * feats[j];
    if (model.pa_index && g == Group::B) z += model.coefficients[*model.pa_index];
    return z;
}

}  // namespace

std::vector<double> point_logits(const LRModel& model, const Aggregation& agg) {
    std::vector<double> logits(agg.dist.size());
    for (std::size_t i = 0; i < agg.dist.size(); ++i)
        logits[i] =
            features_logit(model, agg.point_features[i], agg.dist[i].group);
    return logits;
}

Predictor predictor_from_logits(const std::vector<double>& logits) {
    Predictor pred;
    pred.values.reserve(logits.size());
    for (double z : logits) pred.values.push_back(rat_from_double(sigmoid(z)));
    return pred;
}

Predictor predict(const LRModel& model, const Aggregation& agg) {
    return predictor_from_logits(point_logits(model, agg));
}

Classifier classify_logits(const std::vector<double>& logits, double tau) {
    const double t = logit(tau);
    std::vector<int> bits(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) bits[i] = logits[i] >= t;
    return Classifier::det(std::move(bits));
}

Classifier classify(const LRModel& model, const Aggregation& agg, double tau) {
    return classify_logits(point_logits(model, agg), tau);
}

LRModel zero_pa(const LRModel& model) {
    if (!model.pa_index)
        throw std::invalid_argument("zero_pa needs an aware model");
    LRModel out = model;
    const std::size_t k = *model.pa_index;
    out.prior_pa_coef = model.coefficients[k];
    out.coefficients.erase(out.coefficients.begin() + k);
    out.std_coefficients.erase(out.std_coefficients.begin() + k);
    out.feature_names.erase(out.feature_names.begin() + k);
    out.pa_index.reset();
    return out;
}

ZeroPaReport analyze_zero_pa(const Aggregation& agg, const LRModel& aware_model,
                             double tau) {
    const double c_g = aware_model.pa_coef();
    const EmpiricalDistribution& dist = agg.dist;
    const std::vector<double> lo = point_logits(aware_model, agg);
    const std::vector<double> lo_prime = point_logits(zero_pa(aware_model), agg);
    const double t = logit(tau);

    ZeroPaReport rep;
    rep.c_g = c_g;
    rep.p_b = dist.group_mass(Group::B);

    const Classifier f = classify_logits(lo, tau);
    const Classifier fprime = classify_logits(lo_prime, tau);
    rep.acc_f = accuracy(dist, f);
    rep.acc_fprime = accuracy(dist, fprime);
    rep.di_f = disparate_impact(dist, f);
    rep.di_fprime = disparate_impact(dist, fprime);

    // Q = group-B points pushed from below the logit threshold to at/above
    // it.  Membership uses the same computed logits as the classifiers, so
    // Q and the flip set agree pointwise by construction.
    rep.p_q = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i].group != Group::B) continue;
        if (lo[i] < t && lo_prime[i] >= t) {
            rep.q_points.push_back(i);
            rep.p_q += dist[i].mass;
        }
    }

    rep.acc_bound = rat_from_double(2.0 * sigmoid(-c_g)) * rep.p_q;
    rep.predicted_di_drop = rep.p_q / rep.p_b;  // p_b > 0: DI above would throw
    rep.b_still_disadvantaged = rep.di_fprime >= 0;
    return rep;
}

// --------------------------------------------------------------------------
// Flat key-value model format
// --------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize(const LRModel& model) {
    std::ostringstream out;
    out << "intercept " << fmt(model.intercept) << "\n";
    for (std::size_t j = 0; j < model.coefficients.size(); ++j)
        out << "coef " << model.feature_names[j] << " "
            << fmt(model.coefficients[j]) << "\n";
    out << "std_intercept " << fmt(model.std_intercept) << "\n";
    for (std::size_t j = 0; j < model.std_coefficients.size(); ++j)
        out << "std_coef " << model.feature_names[j] << " "
            << fmt(model.std_coefficients[j]) << "\n";
    if (model.pa_index) out << "pa " << model.feature_names[*model.pa_index] << "\n";
    if (model.prior_pa_coef)
        out << "prior_pa_coef " << fmt(*model.prior_pa_coef) << "\n";
    out << "converged " << (model.converged ? 1 : 0) << "\n";
    out << "iterations " << model.iterations << "\n";
    out << "final_loss " << fmt(model.final_loss) << "\n";
    return out.str();
}

LRModel deserialize_model(const std::string& text) {
    LRModel model;
    std::istringstream in(text);
    std::string line;
    std::string pa_name;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "intercept") {
            ls >> model.intercept;
        } else if (key == "coef") {
            std::string name;
            double v;
            ls >> name >> v;
            model.feature_names.push_back(name);
            model.coefficients.push_back(v);
        } else if (key == "std_intercept") {
            ls >> model.std_intercept;
        } else if (key == "std_coef") {
            std::string name;
            double v;
            ls >> name >> v;
            model.std_coefficients.push_back(v);
        } else if (key == "pa") {
            ls >> pa_name;
        } else if (key == "prior_pa_coef") {
            double v;
            ls >> v;
            model.prior_pa_coef = v;
        } else if (key == "converged") {
            int v;
            ls >> v;
            model.converged = v != 0;
        } else if (key == "iterations") {
            ls >> model.iterations;
        } else if (key == "final_loss") {
            ls >> model.final_loss;
        } else {
            throw DataError("unknown model key '" + key + "'");
        }
        if (ls.fail()) throw DataError("bad model line: " + line);
    }
    if (!pa_name.empty()) {
        for (std::size_t j = 0; j < model.feature_names.size(); ++j)
            if (model.feature_names[j] == pa_name) model.pa_index = j;
        if (!model.pa_index) throw DataError("pa column '" + pa_name + "' not found");
    }
    return model;
}

}  // namespace fairmult
