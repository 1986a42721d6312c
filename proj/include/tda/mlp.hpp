#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tda/scg.hpp"
#include "tda/types.hpp"

namespace tda::nets {

/// Two-layer perceptron, tanh hidden units, linear output:
/// y_k = b2_k + sum_j w2_kj * tanh(b1_j + sum_i w1_ji * x_i).
struct MlpParams {
    int input_dim = 0;
    int hidden_units = 0;
    int output_dim = 0;
    Matrix w1;                // hidden_units x input_dim
    std::vector<double> b1;   // hidden_units
    Matrix w2;                // output_dim x hidden_units
    std::vector<double> b2;   // output_dim

    std::size_t parameter_count() const {
        return w1.data.size() + b1.size() + w2.data.size() + b2.size();
    }
    void validate() const;

    bool operator==(const MlpParams&) const = default;
};

struct TrainConfig {
    double weight_decay = 1.5;
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    std::uint64_t seed = 0;
};

/// Seeded init: every weight and bias uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
MlpParams mlp_init(int input_dim, int hidden_units, int output_dim, std::uint64_t seed);

std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x);

/// Sum-of-squares error plus weight decay:
/// 0.5 * sum_n sum_k (y(x_n)_k - Y_nk)^2 + 0.5 * nu * ||all parameters||^2.
double mlp_cost(const MlpParams& p, const Matrix& X, const Matrix& Y, double weight_decay);

/// Exact backpropagation gradient of mlp_cost, same shape as the parameters.
MlpParams mlp_gradient(const MlpParams& p, const Matrix& X, const Matrix& Y, double weight_decay);

// Flat-vector packing used by the optimizer: w1, b1, w2, b2 in that order.
std::vector<double> mlp_pack(const MlpParams& p);
void mlp_unpack(std::span<const double> w, MlpParams& p);

struct ScgReport {
    int iterations = 0;
    double final_cost = 0.0;
    double final_gradient_norm = 0.0;
    bool converged = false;
    std::vector<double> cost_trace;
};

/// Scaled conjugate gradient training. Deterministic given (init, X, Y, cfg);
/// the returned cost never exceeds the initial cost.
MlpParams scg_train(const MlpParams& init, const Matrix& X, const Matrix& Y,
                    const TrainConfig& cfg, ScgReport* report = nullptr);

}  // namespace tda::nets
