#include "tda/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tda::svr {

void SvrConfig::validate() const {
    if (!(epsilon > 0.0)) throw ValidationError("SvrConfig.epsilon must be > 0");
    if (!(C > 0.0)) throw ValidationError("SvrConfig.C must be > 0");
    if (!(kernel_width > 0.0)) throw ValidationError("SvrConfig.kernel_width must be > 0");
    if (!(qp_tolerance > 0.0)) throw ValidationError("SvrConfig.qp_tolerance must be > 0");
    if (max_passes < 1) throw ValidationError("SvrConfig.max_passes must be >= 1");
}

double erbf_kernel(std::span<const double> x, std::span<const double> z, double sigma) {
    if (x.size() != z.size()) throw ValidationError("erbf_kernel: dimension mismatch");
    if (!(sigma > 0.0)) throw ValidationError("erbf_kernel: sigma must be > 0");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        d2 += d * d;
    }
    return std::exp(-std::sqrt(d2) / (2.0 * sigma * sigma));
}

double epsilon_loss(double predicted, double target, double epsilon) {
    if (epsilon < 0.0) throw ValidationError("epsilon_loss: epsilon must be >= 0");
    const double diff = std::abs(predicted - target);
    return diff <= epsilon ? 0.0 : diff - epsilon;
}

namespace {

Matrix kernel_matrix(const Matrix& X, double sigma) {
    const std::size_t l = X.rows;
    Matrix k(l, l);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(l); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < l; ++j)
            k(i, j) = erbf_kernel(X.row(i), X.row(j), sigma);
    }
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < i; ++j) k(i, j) = k(j, i);
    return k;
}

// Prediction sums without bias, F_i = sum_j beta_j K_ij.
std::vector<double> prediction_sums(const Matrix& k, std::span<const double> beta) {
    const std::size_t l = k.rows;
    std::vector<double> f(l, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(l); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double acc = 0.0;
        for (std::size_t j = 0; j < l; ++j) acc += beta[j] * k(i, j);
        f[i] = acc;
    }
    return f;
}

double bias_from_bounds(std::span<const double> alpha, std::span<const double> alpha_star,
                        std::span<const double> v, double epsilon, double c, double margin,
                        bool* fallback_used) {
    const std::size_t l = alpha.size();
    // Eq.-7 route: lowest-index unbounded support vector on each side.
    std::size_t r = l, s = l;
    for (std::size_t i = 0; i < l && (r == l || s == l); ++i) {
        if (r == l && alpha[i] > margin && alpha[i] < c - margin) r = i;
        if (s == l && alpha_star[i] > margin && alpha_star[i] < c - margin) s = i;
    }
    if (r < l && s < l) {
        if (fallback_used) *fallback_used = false;
        return 0.5 * ((v[r] - epsilon) + (v[s] + epsilon));
    }

    // Degenerate case: average the KKT-implied bias bounds.
    if (fallback_used) *fallback_used = true;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < l; ++i) {
        if (alpha[i] < c) lo = std::max(lo, v[i] - epsilon);
        if (alpha[i] > 0.0) hi = std::min(hi, v[i] - epsilon);
        if (alpha_star[i] < c) hi = std::min(hi, v[i] + epsilon);
        if (alpha_star[i] > 0.0) lo = std::max(lo, v[i] + epsilon);
    }
    if (!std::isfinite(lo) && !std::isfinite(hi)) return 0.0;
    if (!std::isfinite(lo)) return hi;
    if (!std::isfinite(hi)) return lo;
    return 0.5 * (lo + hi);
}

struct SmoResult {
    std::vector<double> alpha;
    std::vector<double> alpha_star;
    bool converged = false;
    double gap = 0.0;
    long updates = 0;
};

// Pairwise coordinate ascent on the dual. Variables t in [0, 2l): t < l is
// alpha_i (sign +1), t >= l is alpha*_i (sign -1). Minimizes
//   F(a) = 0.5 sum s_t s_u a_t a_u K + sum p_t a_t
// with p_t = eps -/+ y_i, which is the negated dual objective, under
// sum s_t a_t = 0 and the [0, C] box.
SmoResult smo_solve(const Matrix& k, std::span<const double> y, const SvrConfig& cfg,
                    const Matrix& x_for_trace, SvrTrace* trace) {
    const std::size_t l = k.rows;
    const std::size_t n2 = 2 * l;
    const double c = cfg.C;

    std::vector<double> a(n2, 0.0);
    std::vector<double> grad(n2);
    for (std::size_t i = 0; i < l; ++i) {
        grad[i] = cfg.epsilon - y[i];
        grad[i + l] = cfg.epsilon + y[i];
    }

    auto sign_of = [l](std::size_t t) { return t < l ? 1.0 : -1.0; };

    SmoResult res;
    for (long pass = 0; pass < cfg.max_passes; ++pass) {
        // Maximal violating pair; strict comparisons keep the lowest index
        // on ties, which makes the solve deterministic.
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        std::size_t t_up = n2, t_low = n2;
        for (std::size_t t = 0; t < n2; ++t) {
            const double val = -sign_of(t) * grad[t];
            const bool upper_ok = t < l ? a[t] < c : a[t] > 0.0;
            const bool lower_ok = t < l ? a[t] > 0.0 : a[t] < c;
            if (upper_ok && val > m_up) {
                m_up = val;
                t_up = t;
            }
            if (lower_ok && val < m_low) {
                m_low = val;
                t_low = t;
            }
        }
        res.gap = m_up - m_low;
        if (t_up == n2 || t_low == n2 || res.gap <= cfg.qp_tolerance) {
            res.converged = true;
            break;
        }

        const std::size_t i = t_up % l;
        const std::size_t j = t_low % l;
        const double s_t = sign_of(t_up);
        const double s_u = sign_of(t_low);

        // Feasible direction: a_t moves by s_t*d, a_u by -s_u*d, which
        // preserves the equality constraint exactly.
        const double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);
        const double hi_t = s_t > 0.0 ? c - a[t_up] : a[t_up];
        const double hi_u = s_u > 0.0 ? a[t_low] : c - a[t_low];
        const double d_max = std::min(hi_t, hi_u);
        double d = eta > 1e-300 ? res.gap / eta : d_max;
        d = std::min(d, d_max);
        if (!(d > 0.0)) break;  // numerically stuck pair; reported via gap

        // Land exactly on the box when the step is clipped there.
        if (d == hi_t)
            a[t_up] = s_t > 0.0 ? c : 0.0;
        else
            a[t_up] += s_t * d;
        if (d == hi_u)
            a[t_low] = s_u > 0.0 ? 0.0 : c;
        else
            a[t_low] -= s_u * d;
        a[t_up] = std::clamp(a[t_up], 0.0, c);
        a[t_low] = std::clamp(a[t_low], 0.0, c);

        const double* ki = k.data.data() + i * l;
        const double* kj = k.data.data() + j * l;
        for (std::size_t t = 0; t < n2; ++t) {
            const double base = ki[t % l] - kj[t % l];
            grad[t] += sign_of(t) * d * base;
        }
        ++res.updates;

        if (trace) {
            std::vector<double> alpha(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(l));
            std::vector<double> alpha_star(a.begin() + static_cast<std::ptrdiff_t>(l), a.end());
            trace->dual_objectives.push_back(
                svr_dual_objective(x_for_trace, y, alpha, alpha_star, cfg));
        }
    }

    res.alpha.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(l));
    res.alpha_star.assign(a.begin() + static_cast<std::ptrdiff_t>(l), a.end());
    return res;
}

}  // namespace

double svr_bias(std::span<const double> alpha, std::span<const double> alpha_star,
                const Matrix& X, std::span<const double> y, const SvrConfig& cfg,
                bool* fallback_used) {
    cfg.validate();
    const std::size_t l = X.rows;
    if (alpha.size() != l || alpha_star.size() != l || y.size() != l)
        throw ValidationError("svr_bias: multiplier/target lengths do not match X rows");

    const Matrix k = kernel_matrix(X, cfg.kernel_width);
    std::vector<double> beta(l);
    for (std::size_t i = 0; i < l; ++i) beta[i] = alpha[i] - alpha_star[i];
    const std::vector<double> f = prediction_sums(k, beta);
    std::vector<double> v(l);
    for (std::size_t i = 0; i < l; ++i) v[i] = y[i] - f[i];
    return bias_from_bounds(alpha, alpha_star, v, cfg.epsilon, cfg.C, cfg.qp_tolerance,
                            fallback_used);
}

double svr_dual_objective(const Matrix& X, std::span<const double> y,
                          std::span<const double> alpha, std::span<const double> alpha_star,
                          const SvrConfig& cfg) {
    const std::size_t l = X.rows;
    if (alpha.size() != l || alpha_star.size() != l || y.size() != l)
        throw ValidationError("svr_dual_objective: length mismatch");
    const Matrix k = kernel_matrix(X, cfg.kernel_width);
    std::vector<double> beta(l);
    for (std::size_t i = 0; i < l; ++i) beta[i] = alpha[i] - alpha_star[i];
    double quad = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < l; ++j) acc += beta[j] * k(i, j);
        quad += beta[i] * acc;
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < l; ++i)
        lin += y[i] * beta[i] - cfg.epsilon * (alpha[i] + alpha_star[i]);
    return -0.5 * quad + lin;
}

void svr_standardize(const SvrParams& p, const Matrix& X_raw, std::span<const double> y_raw,
                     Matrix& X_std, std::vector<double>& y_std) {
    if (X_raw.cols != p.input_mean.size())
        throw ValidationError("svr_standardize: input dimension mismatch");
    X_std = X_raw;
    for (std::size_t i = 0; i < X_std.rows; ++i)
        for (std::size_t j = 0; j < X_std.cols; ++j)
            X_std(i, j) = (X_raw(i, j) - p.input_mean[j]) / p.input_scale[j];
    y_std.assign(y_raw.begin(), y_raw.end());
    for (auto& t : y_std) t = (t - p.target_mean) / p.target_scale;
}

SvrParams svr_train(const Matrix& X, std::span<const double> y, const SvrConfig& cfg,
                    SvrTrace* trace) {
    cfg.validate();
    if (X.rows != y.size()) throw ValidationError("svr_train: X rows must equal y length");
    if (X.rows < 2) throw ValidationError("svr_train: need at least 2 training rows");

    const std::size_t l = X.rows;
    const std::size_t d = X.cols;

    SvrParams p;
    p.config = cfg;
    p.input_mean.assign(d, 0.0);
    p.input_scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < l; ++i) mean += X(i, j);
        mean /= static_cast<double>(l);
        double var = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            const double dd = X(i, j) - mean;
            var += dd * dd;
        }
        var /= static_cast<double>(l);
        p.input_mean[j] = mean;
        p.input_scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    {
        double mean = 0.0;
        for (double t : y) mean += t;
        mean /= static_cast<double>(l);
        double var = 0.0;
        for (double t : y) {
            const double dd = t - mean;
            var += dd * dd;
        }
        var /= static_cast<double>(l);
        p.target_mean = mean;
        p.target_scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    }

    Matrix xs;
    std::vector<double> ys;
    svr_standardize(p, X, y, xs, ys);

    const Matrix k = kernel_matrix(xs, cfg.kernel_width);
    SmoResult smo = smo_solve(k, ys, cfg, xs, trace);
    p.converged = smo.converged;
    p.kkt_gap = std::max(smo.gap, 0.0);
    p.dual_objective = svr_dual_objective(xs, ys, smo.alpha, smo.alpha_star, cfg);

    bool fallback = false;
    const double b_std = svr_bias(smo.alpha, smo.alpha_star, xs, ys, cfg, &fallback);
    p.bias_fallback = fallback;
    p.bias = p.target_scale * b_std + p.target_mean;

    for (std::size_t i = 0; i < l; ++i) {
        const double beta = smo.alpha[i] - smo.alpha_star[i];
        if (std::abs(beta) > cfg.qp_tolerance) {
            p.support_indices.push_back(static_cast<std::uint32_t>(i));
            p.beta.push_back(beta);
        }
    }
    p.support_inputs = Matrix(p.beta.size(), d);
    for (std::size_t si = 0; si < p.beta.size(); ++si)
        for (std::size_t j = 0; j < d; ++j)
            p.support_inputs(si, j) = xs(p.support_indices[si], j);
    return p;
}

double svr_predict(const SvrParams& p, std::span<const double> x) {
    if (x.size() != p.input_mean.size())
        throw ValidationError("svr_predict: input dimension mismatch");
    std::vector<double> xs(x.size());
    for (std::size_t j = 0; j < xs.size(); ++j)
        xs[j] = (x[j] - p.input_mean[j]) / p.input_scale[j];
    double acc = 0.0;
    for (std::size_t i = 0; i < p.beta.size(); ++i)
        acc += p.beta[i] * erbf_kernel(p.support_inputs.row(i), xs, p.config.kernel_width);
    return p.target_scale * acc + p.bias;
}

double svr_kkt_violation(const SvrParams& p, const Matrix& X_raw, std::span<const double> y_raw) {
    Matrix xs;
    std::vector<double> ys;
    svr_standardize(p, X_raw, y_raw, xs, ys);
    const std::size_t l = xs.rows;

    std::vector<double> beta_full(l, 0.0);
    for (std::size_t si = 0; si < p.beta.size(); ++si) {
        if (p.support_indices[si] >= l)
            throw ValidationError("svr_kkt_violation: support index outside dataset");
        beta_full[p.support_indices[si]] = p.beta[si];
    }
    const Matrix k = kernel_matrix(xs, p.config.kernel_width);
    const std::vector<double> f = prediction_sums(k, beta_full);
    const double b_std = (p.bias - p.target_mean) / p.target_scale;

    const double eps = p.config.epsilon;
    const double c = p.config.C;
    const double margin = p.config.qp_tolerance;
    double worst = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        const double resid = ys[i] - (f[i] + b_std);  // y - f(x), standardized
        const double beta = beta_full[i];
        double viol = 0.0;
        if (std::abs(beta) <= margin) {
            viol = std::max(0.0, std::abs(resid) - eps);
        } else if (beta >= c - margin) {
            viol = std::max(0.0, eps - resid);
        } else if (beta <= -c + margin) {
            viol = std::max(0.0, eps + resid);
        } else if (beta > 0.0) {
            viol = std::abs(resid - eps);
        } else {
            viol = std::abs(resid + eps);
        }
        worst = std::max(worst, viol);
    }
    return worst;
}

}  // namespace tda::svr
