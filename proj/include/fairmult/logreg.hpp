#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairmult/empdist.hpp"
#include "fairmult/metrics.hpp"

namespace fairmult {

double sigmoid(double z);
double logit(double p);  // inverse; requires p in (0,1)

// Linear model over the row features, optionally with an appended 0/1
// protected-attribute column (1 = group B).  Coefficients are kept in
// original feature units; the standardized copy used by the optimizer is
// retained for reporting.
struct LRModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<std::string> feature_names;
    std::optional<std::size_t> pa_index;      // set iff trained aware
    std::optional<double> prior_pa_coef;      // set by zero_pa for provenance

    double std_intercept = 0.0;
    std::vector<double> std_coefficients;

    bool converged = false;
    int iterations = 0;
    double final_loss = 0.0;

    double pa_coef() const;  // requires pa_index
};

struct TrainConfig {
    double learning_rate = 1.0;      // initial step; backtracking halves it
    int max_iters = 500;
    // Max-norm of the gradient.  Mean-loss decrements fall below double
    // resolution before the gradient reaches 1e-8 on ~1e4-row data, so a
    // tighter default would never report convergence.
    double convergence_tol = 1e-7;
    double l2_penalty = 0.0;         // applied to coefficients, not intercept
    std::uint64_t seed = 0;          // unused by the deterministic optimizer
};

// Full-batch gradient descent on mean logistic loss.  Continuous features
// are standardized internally (binary 0/1 columns, including the appended
// protected attribute, are left raw); the returned model is de-standardized.
// Loss is non-increasing across accepted steps.  Non-convergence is reported
// through `converged`, not an error.
LRModel train(const RowDataset& data, bool aware, const TrainConfig& cfg,
              const std::string& pa_feature_name = "protected_attribute");

// Loss/gradient of the mean logistic loss at w (w[0] = intercept, w[1+j] =
// feature j), for optimizer tests against finite differences.
struct LossGrad {
    double loss;
    std::vector<double> grad;
};
LossGrad logistic_loss_grad(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels,
                            const std::vector<double>& w, double l2_penalty);

// Pre-sigmoid values per aggregated point (protected attribute filled from
// the point's group).  All classification decisions are made on these
// logits: the sigmoid can round scores near the decision boundary onto it
// (sigma of a tiny negative logit rounds to exactly 0.5), so thresholding
// sigmoid scores is not equivalent.
std::vector<double> point_logits(const LRModel& model, const Aggregation& agg);

// Scores sigma(logit) as exact rationals of the computed doubles.
Predictor predictor_from_logits(const std::vector<double>& logits);
Predictor predict(const LRModel& model, const Aggregation& agg);

// Deterministic classifier: 1 iff logit >= logit(tau).  tau = 0.5 compares
// against exactly 0.
Classifier classify_logits(const std::vector<double>& logits, double tau = 0.5);
Classifier classify(const LRModel& model, const Aggregation& agg,
                    double tau = 0.5);

// Drop the protected-attribute coefficient (the naive unaware variant).
// Keeps the removed coefficient in `prior_pa_coef`.
LRModel zero_pa(const LRModel& model);

// ---------------------------------------------------------------------------
// Coefficient-zeroing analysis
//
// For an aware model with negative PA coefficient c_G, the points whose
// classification changes under zero_pa are exactly the group-B points with
// logit in [logit(tau) + c_G, logit(tau)) — the region Q below.  The report
// carries the exact accuracy/DI changes next to the stated bounds.
// ---------------------------------------------------------------------------

struct ZeroPaReport {
    double c_g = 0.0;
    Rat p_q;                    // P(X in Q)
    Rat p_b;                    // P(X in B)
    std::vector<std::size_t> q_points;  // aggregated point indices in Q

    Rat acc_f, acc_fprime;      // exact accuracies (aware / unaware)
    Rat di_f, di_fprime;        // exact signed DIs
    Rat acc_bound;              // 2*sigma(-c_g)*P(Q), the stated bound
    Rat predicted_di_drop;      // P(Q)/P(B)
    bool b_still_disadvantaged = false;  // signed DI of F' still >= 0
};

ZeroPaReport analyze_zero_pa(const Aggregation& agg, const LRModel& aware_model,
                             double tau = 0.5);

// Flat key-value serialization for audit provenance.
std::string serialize(const LRModel& model);
LRModel deserialize_model(const std::string& text);

}  // namespace fairmult
