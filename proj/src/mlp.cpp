#include "tda/mlp.hpp"

#include <cmath>
#include <cstring>

#include "tda/rng.hpp"

namespace tda::nets {

void MlpParams::validate() const {
    if (input_dim <= 0 || hidden_units <= 0 || output_dim <= 0)
        throw ValidationError("MlpParams: dimensions must be positive");
    const auto m = static_cast<std::size_t>(hidden_units);
    const auto d = static_cast<std::size_t>(input_dim);
    const auto k = static_cast<std::size_t>(output_dim);
    if (w1.rows != m || w1.cols != d || b1.size() != m || w2.rows != k || w2.cols != m ||
        b2.size() != k)
        throw ValidationError("MlpParams: parameter shapes are inconsistent");
    for (double v : w1.data)
        if (!std::isfinite(v)) throw ValidationError("MlpParams.w1: non-finite value");
    for (double v : b1)
        if (!std::isfinite(v)) throw ValidationError("MlpParams.b1: non-finite value");
    for (double v : w2.data)
        if (!std::isfinite(v)) throw ValidationError("MlpParams.w2: non-finite value");
    for (double v : b2)
        if (!std::isfinite(v)) throw ValidationError("MlpParams.b2: non-finite value");
}

MlpParams mlp_init(int input_dim, int hidden_units, int output_dim, std::uint64_t seed) {
    MlpParams p;
    p.input_dim = input_dim;
    p.hidden_units = hidden_units;
    p.output_dim = output_dim;
    p.w1 = Matrix(static_cast<std::size_t>(hidden_units), static_cast<std::size_t>(input_dim));
    p.b1.assign(static_cast<std::size_t>(hidden_units), 0.0);
    p.w2 = Matrix(static_cast<std::size_t>(output_dim), static_cast<std::size_t>(hidden_units));
    p.b2.assign(static_cast<std::size_t>(output_dim), 0.0);
    p.validate();

    GaussianGen gen(mix_seed(seed, 0xAB1E5EEDULL));
    const double r1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (auto& v : p.w1.data) v = (2.0 * gen.uniform() - 1.0) * r1;
    for (auto& v : p.b1) v = (2.0 * gen.uniform() - 1.0) * r1;
    const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden_units));
    for (auto& v : p.w2.data) v = (2.0 * gen.uniform() - 1.0) * r2;
    for (auto& v : p.b2) v = (2.0 * gen.uniform() - 1.0) * r2;
    return p;
}

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x) {
    p.validate();
    if (x.size() != static_cast<std::size_t>(p.input_dim))
        throw ValidationError("mlp_forward: input length does not match input_dim");
    const auto m = static_cast<std::size_t>(p.hidden_units);
    const auto d = static_cast<std::size_t>(p.input_dim);
    const auto k_out = static_cast<std::size_t>(p.output_dim);

    std::vector<double> z(m);
    for (std::size_t j = 0; j < m; ++j) {
        double a = p.b1[j];
        const double* wr = p.w1.data.data() + j * d;
        for (std::size_t i = 0; i < d; ++i) a += wr[i] * x[i];
        z[j] = std::tanh(a);
    }
    std::vector<double> y(k_out);
    for (std::size_t k = 0; k < k_out; ++k) {
        double acc = p.b2[k];
        const double* wr = p.w2.data.data() + k * m;
        for (std::size_t j = 0; j < m; ++j) acc += wr[j] * z[j];
        y[k] = acc;
    }
    return y;
}

namespace {

// Fused batch pass. Fills `grad` (flat, mlp_pack layout) when non-null and
// returns the data cost; decay terms are added by the caller. Examples are
// accumulated in fixed-size blocks that are summed in index order, so the
// result is bit-identical for any OpenMP thread count.
double batch_pass(const MlpParams& p, const Matrix& X, const Matrix& Y,
                  std::vector<double>* grad) {
    const auto n = X.rows;
    const auto d = static_cast<std::size_t>(p.input_dim);
    const auto m = static_cast<std::size_t>(p.hidden_units);
    const auto k_out = static_cast<std::size_t>(p.output_dim);
    const std::size_t n_params = p.parameter_count();

    constexpr std::size_t kBlock = 256;
    const std::size_t n_blocks = n == 0 ? 0 : (n + kBlock - 1) / kBlock;

    std::vector<double> block_cost(n_blocks, 0.0);
    std::vector<double> block_grad;
    if (grad) block_grad.assign(n_blocks * n_params, 0.0);

    const std::size_t off_w1 = 0;
    const std::size_t off_b1 = m * d;
    const std::size_t off_w2 = off_b1 + m;
    const std::size_t off_b2 = off_w2 + k_out * m;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(n_blocks); ++bi) {
        const std::size_t lo = static_cast<std::size_t>(bi) * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        double* g = grad ? block_grad.data() + static_cast<std::size_t>(bi) * n_params : nullptr;
        double cost = 0.0;

        std::vector<double> z(m), delta_out(k_out), delta_hidden(m);
        for (std::size_t row = lo; row < hi; ++row) {
            const double* x = X.data.data() + row * d;
            for (std::size_t j = 0; j < m; ++j) {
                double a = p.b1[j];
                const double* wr = p.w1.data.data() + j * d;
                for (std::size_t i = 0; i < d; ++i) a += wr[i] * x[i];
                z[j] = std::tanh(a);
            }
            for (std::size_t k = 0; k < k_out; ++k) {
                double acc = p.b2[k];
                const double* wr = p.w2.data.data() + k * m;
                for (std::size_t j = 0; j < m; ++j) acc += wr[j] * z[j];
                const double r = acc - Y(row, k);
                delta_out[k] = r;
                cost += 0.5 * r * r;
            }
            if (g) {
                for (std::size_t j = 0; j < m; ++j) {
                    double back = 0.0;
                    for (std::size_t k = 0; k < k_out; ++k) back += p.w2(k, j) * delta_out[k];
                    delta_hidden[j] = (1.0 - z[j] * z[j]) * back;
                }
                for (std::size_t k = 0; k < k_out; ++k) {
                    double* gw2 = g + off_w2 + k * m;
                    for (std::size_t j = 0; j < m; ++j) gw2[j] += delta_out[k] * z[j];
                    g[off_b2 + k] += delta_out[k];
                }
                for (std::size_t j = 0; j < m; ++j) {
                    double* gw1 = g + off_w1 + j * d;
                    const double dh = delta_hidden[j];
                    for (std::size_t i = 0; i < d; ++i) gw1[i] += dh * x[i];
                    g[off_b1 + j] += dh;
                }
            }
        }
        block_cost[static_cast<std::size_t>(bi)] = cost;
    }

    double cost = 0.0;
    for (double c : block_cost) cost += c;
    if (grad) {
        grad->assign(n_params, 0.0);
        for (std::size_t bi = 0; bi < n_blocks; ++bi) {
            const double* g = block_grad.data() + bi * n_params;
            for (std::size_t i = 0; i < n_params; ++i) (*grad)[i] += g[i];
        }
    }
    return cost;
}

void check_batch_shapes(const MlpParams& p, const Matrix& X, const Matrix& Y) {
    p.validate();
    if (X.cols != static_cast<std::size_t>(p.input_dim))
        throw ValidationError("mlp: X column count does not match input_dim");
    if (Y.cols != static_cast<std::size_t>(p.output_dim))
        throw ValidationError("mlp: Y column count does not match output_dim");
    if (X.rows != Y.rows) throw ValidationError("mlp: X and Y row counts differ");
}

}  // namespace

std::vector<double> mlp_pack(const MlpParams& p) {
    std::vector<double> w;
    w.reserve(p.parameter_count());
    w.insert(w.end(), p.w1.data.begin(), p.w1.data.end());
    w.insert(w.end(), p.b1.begin(), p.b1.end());
    w.insert(w.end(), p.w2.data.begin(), p.w2.data.end());
    w.insert(w.end(), p.b2.begin(), p.b2.end());
    return w;
}

void mlp_unpack(std::span<const double> w, MlpParams& p) {
    if (w.size() != p.parameter_count())
        throw ValidationError("mlp_unpack: flat vector length mismatch");
    std::size_t off = 0;
    std::memcpy(p.w1.data.data(), w.data() + off, p.w1.data.size() * sizeof(double));
    off += p.w1.data.size();
    std::memcpy(p.b1.data(), w.data() + off, p.b1.size() * sizeof(double));
    off += p.b1.size();
    std::memcpy(p.w2.data.data(), w.data() + off, p.w2.data.size() * sizeof(double));
    off += p.w2.data.size();
    std::memcpy(p.b2.data(), w.data() + off, p.b2.size() * sizeof(double));
}

double mlp_cost(const MlpParams& p, const Matrix& X, const Matrix& Y, double weight_decay) {
    check_batch_shapes(p, X, Y);
    double cost = batch_pass(p, X, Y, nullptr);
    if (weight_decay != 0.0) {
        double sq = 0.0;
        for (double v : p.w1.data) sq += v * v;
        for (double v : p.b1) sq += v * v;
        for (double v : p.w2.data) sq += v * v;
        for (double v : p.b2) sq += v * v;
        cost += 0.5 * weight_decay * sq;
    }
    return cost;
}

MlpParams mlp_gradient(const MlpParams& p, const Matrix& X, const Matrix& Y,
                       double weight_decay) {
    check_batch_shapes(p, X, Y);
    std::vector<double> flat;
    batch_pass(p, X, Y, &flat);
    if (weight_decay != 0.0) {
        const std::vector<double> theta = mlp_pack(p);
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += weight_decay * theta[i];
    }
    MlpParams g = p;
    mlp_unpack(flat, g);
    return g;
}

MlpParams scg_train(const MlpParams& init, const Matrix& X, const Matrix& Y,
                    const TrainConfig& cfg, ScgReport* report) {
    check_batch_shapes(init, X, Y);
    if (cfg.max_iterations < 1)
        throw ValidationError("TrainConfig.max_iterations must be >= 1");
    if (!(cfg.gradient_tolerance > 0.0))
        throw ValidationError("TrainConfig.gradient_tolerance must be > 0");
    if (cfg.weight_decay < 0.0)
        throw ValidationError("TrainConfig.weight_decay must be >= 0");

    MlpParams scratch = init;
    auto objective = [&](std::span<const double> w, std::vector<double>* grad) -> double {
        mlp_unpack(w, scratch);
        double cost = batch_pass(scratch, X, Y, grad);
        if (cfg.weight_decay != 0.0) {
            double sq = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) sq += w[i] * w[i];
            cost += 0.5 * cfg.weight_decay * sq;
            if (grad)
                for (std::size_t i = 0; i < w.size(); ++i)
                    (*grad)[i] += cfg.weight_decay * w[i];
        }
        return cost;
    };

    ScgOptions opts;
    opts.max_iterations = cfg.max_iterations;
    opts.gradient_tolerance = cfg.gradient_tolerance;
    ScgResult res = scg_minimize(objective, mlp_pack(init), opts);

    MlpParams trained = init;
    mlp_unpack(res.w, trained);
    if (report) {
        report->iterations = res.iterations;
        report->final_cost = res.cost;
        report->final_gradient_norm = res.gradient_norm;
        report->converged = res.converged;
        report->cost_trace = std::move(res.cost_trace);
    }
    return trained;
}

}  // namespace tda::nets
