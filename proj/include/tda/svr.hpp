#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tda/types.hpp"

namespace tda::svr {

/// Epsilon-insensitive support vector regression settings. kernel_width is
/// the sigma of the exponential RBF kernel exp(-||x-z|| / (2 sigma^2));
/// note the unsquared distance.
struct SvrConfig {
    double epsilon = 0.01;       // tube half-width on standardized targets
    double C = 10.0;             // box constraint on each multiplier
    double kernel_width = 10.0;  // sigma
    double qp_tolerance = 1e-6;  // KKT violation tolerance
    long max_passes = 2000000;   // cap on pairwise SMO updates

    void validate() const;

    bool operator==(const SvrConfig&) const = default;
};

/// Trained model. Inputs and targets are standardized with statistics from
/// the training data; support inputs and beta live in the standardized
/// space, while `bias` already folds the target de-standardization so that
/// predictions are f(x) = target_scale * sum_i beta_i K(sv_i, x~) + bias.
struct SvrParams {
    Matrix support_inputs;       // standardized support points
    std::vector<double> beta;    // alpha_i - alpha*_i per support point
    std::vector<std::uint32_t> support_indices;  // rows of the training set
    double bias = 0.0;           // constant term in raw target units
    SvrConfig config;

    std::vector<double> input_mean;
    std::vector<double> input_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;

    bool converged = true;
    bool bias_fallback = false;  // no unbounded support vector on one side
    double kkt_gap = 0.0;        // worst residual KKT violation at exit
    double dual_objective = 0.0;

    bool operator==(const SvrParams&) const = default;
};

/// Exponential RBF kernel K(x,z) = exp(-||x-z||_2 / (2 sigma^2)).
double erbf_kernel(std::span<const double> x, std::span<const double> z, double sigma);

/// Epsilon-insensitive loss: 0 inside the tube, |diff| - epsilon outside.
double epsilon_loss(double predicted, double target, double epsilon);

/// Optional per-update instrumentation for tests.
struct SvrTrace {
    std::vector<double> dual_objectives;
};

/// Trains by pairwise coordinate ascent on the dual (SMO): repeatedly picks
/// the maximally KKT-violating pair (lowest index on ties), solves the
/// two-variable subproblem in closed form, and stops when the violation gap
/// falls below qp_tolerance or max_passes updates have run. Non-convergence
/// is reported through `converged` and `kkt_gap`, never an exception.
SvrParams svr_train(const Matrix& X, std::span<const double> y, const SvrConfig& cfg,
                    SvrTrace* trace = nullptr);

/// f(x) = sum_i beta_i K(sv_i, x) + bias, with standardization applied.
double svr_predict(const SvrParams& p, std::span<const double> x);

/// Bias from the trained multipliers: uses the lowest-index unbounded
/// support vector on each side of the tube when both exist, otherwise the
/// midpoint of the KKT-implied [b_low, b_high] interval (flag set).
/// Operates in the space of its arguments; no standardization.
double svr_bias(std::span<const double> alpha, std::span<const double> alpha_star,
                const Matrix& X, std::span<const double> y, const SvrConfig& cfg,
                bool* fallback_used = nullptr);

/// Dual objective of the epsilon-SVR QP at (alpha, alpha_star).
double svr_dual_objective(const Matrix& X, std::span<const double> y,
                          std::span<const double> alpha, std::span<const double> alpha_star,
                          const SvrConfig& cfg);

/// Worst KKT violation of a trained model over its training set, measured in
/// the standardized space the QP was solved in.  Exposed for audits.
double svr_kkt_violation(const SvrParams& p, const Matrix& X_raw, std::span<const double> y_raw);

/// Standardized view of a dataset under a trained model's statistics.
void svr_standardize(const SvrParams& p, const Matrix& X_raw, std::span<const double> y_raw,
                     Matrix& X_std, std::vector<double>& y_std);

}  // namespace tda::svr
