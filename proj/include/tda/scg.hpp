#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tda/types.hpp"

namespace tda::nets {

/// Options for the scaled conjugate gradient minimizer. sigma0 controls the
/// step used for directional curvature estimates, lambda0 the initial trust
/// scale; both follow Moller's canonical values.
struct ScgOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double sigma0 = 1e-4;
    double lambda0 = 1e-6;
};

struct ScgResult {
    std::vector<double> w;
    double cost = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_trace;  // initial cost plus every accepted step
};

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }
}  // namespace detail

/// Scaled conjugate gradient minimization (Moller). `objective` must be
/// callable as f(span<const double> w, vector<double>* grad) -> double and
/// fill the gradient when grad is non-null.
///
/// Only steps that do not increase the cost are accepted, so the recorded
/// cost trace is non-increasing. If the initial gradient already satisfies
/// the tolerance, w0 is returned unmodified.
template <typename Objective>
ScgResult scg_minimize(Objective&& objective, std::vector<double> w0, const ScgOptions& opts) {
    const std::size_t n = w0.size();
    ScgResult res;
    res.w = std::move(w0);

    std::vector<double> grad(n), grad_trial(n), grad_sigma(n);
    std::vector<double> p(n), r(n), w_trial(n), s(n);

    double cost = objective(std::span<const double>(res.w), &grad);
    if (!std::isfinite(cost)) throw NumericError("scg: initial cost is not finite");
    res.cost = cost;
    res.cost_trace.push_back(cost);
    res.gradient_norm = detail::norm(grad);
    if (res.gradient_norm < opts.gradient_tolerance) {
        res.converged = true;
        return res;
    }

    for (std::size_t i = 0; i < n; ++i) {
        r[i] = -grad[i];
        p[i] = r[i];
    }

    double lambda = opts.lambda0;
    double lambda_bar = 0.0;
    bool success = true;
    double delta = 0.0;
    double p_sq = 0.0;

    for (int k = 1; k <= opts.max_iterations; ++k) {
        res.iterations = k;
        if (success) {
            p_sq = detail::dot(p, p);
            if (p_sq <= 0.0) {
                res.converged = true;
                break;
            }
            const double sigma = opts.sigma0 / std::sqrt(p_sq);
            for (std::size_t i = 0; i < n; ++i) w_trial[i] = res.w[i] + sigma * p[i];
            objective(std::span<const double>(w_trial), &grad_sigma);
            for (std::size_t i = 0; i < n; ++i) s[i] = (grad_sigma[i] - grad[i]) / sigma;
            delta = detail::dot(p, s);
        }

        // Scale the curvature estimate; force positive definiteness.
        delta += (lambda - lambda_bar) * p_sq;
        if (delta <= 0.0) {
            lambda_bar = 2.0 * (lambda - delta / p_sq);
            delta = -delta + lambda * p_sq;
            lambda = lambda_bar;
        }

        const double mu = detail::dot(p, r);
        const double alpha = mu / delta;

        for (std::size_t i = 0; i < n; ++i) w_trial[i] = res.w[i] + alpha * p[i];
        const double cost_trial = objective(std::span<const double>(w_trial), &grad_trial);
        if (!std::isfinite(cost_trial))
            throw NumericError("scg: cost diverged at iteration " + std::to_string(k));

        const double comparison = 2.0 * delta * (cost - cost_trial) / (mu * mu);

        if (comparison >= 0.0) {
            res.w.swap(w_trial);
            cost = cost_trial;
            res.cost_trace.push_back(cost);
            lambda_bar = 0.0;
            success = true;

            const double r_new_sq = detail::dot(grad_trial, grad_trial);
            if (std::sqrt(r_new_sq) < opts.gradient_tolerance) {
                grad.swap(grad_trial);
                res.converged = true;
                break;
            }
            // Polak-Ribiere style restart every n accepted steps.
            double rr = 0.0;
            for (std::size_t i = 0; i < n; ++i) rr += grad_trial[i] * r[i];
            const double beta = (r_new_sq + rr) / mu;  // (|r_new|^2 - r_new.r_old)/mu
            for (std::size_t i = 0; i < n; ++i) r[i] = -grad_trial[i];
            if (k % static_cast<int>(n) == 0) {
                for (std::size_t i = 0; i < n; ++i) p[i] = r[i];
            } else {
                for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
            }
            grad.swap(grad_trial);
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (comparison < 0.25) lambda += delta * (1.0 - comparison) / p_sq;

        if (!success && lambda > 1e120) break;  // no descent possible at any scale
    }

    res.cost = cost;
    res.gradient_norm = detail::norm(grad);
    if (res.gradient_norm < opts.gradient_tolerance) res.converged = true;
    return res;
}

}  // namespace tda::nets
