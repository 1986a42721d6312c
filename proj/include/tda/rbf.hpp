#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tda/types.hpp"

namespace tda::nets {

/// Radial basis function network with thin-plate-spline bases:
/// y_k(x) = sum_j w2_kj * phi(||x - center_j||) + b2_k, phi(r) = r^2 ln r.
struct RbfParams {
    Matrix centers;           // num_basis x input_dim
    Matrix w2;                // output_dim x num_basis
    std::vector<double> b2;   // output_dim

    int input_dim() const { return static_cast<int>(centers.cols); }
    int num_basis() const { return static_cast<int>(centers.rows); }
    int output_dim() const { return static_cast<int>(b2.size()); }
    void validate() const;

    bool operator==(const RbfParams&) const = default;
};

/// Thin-plate spline value; phi(0) = 0 by the analytic limit of r^2 ln r.
double thin_plate_spline(double r);

/// Basis activations for one input: phi_j(x) = tps(||x - center_j||_2).
std::vector<double> rbf_basis(const Matrix& centers, std::span<const double> x);

/// Deterministic Lloyd k-means with k-means++ style seeding; ties and empty
/// clusters resolve to the lowest admissible index.
Matrix kmeans_centers(const Matrix& X, int k, std::uint64_t seed, int iterations = 50);

/// Two-stage training. Stage 1 places centers with k-means on the inputs
/// alone; stage 2 solves the ridge-regularized linear least squares for the
/// output weights and bias on the fixed design matrix.
RbfParams rbf_train(const Matrix& X, const Matrix& Y, int num_centers, std::uint64_t seed,
                    double ridge = 1e-8);

/// Stage 2 alone: refits output weights and bias for fixed centers. Does not
/// touch p.centers.
void rbf_fit_weights(RbfParams& p, const Matrix& X, const Matrix& Y, double ridge = 1e-8);

std::vector<double> rbf_forward(const RbfParams& p, std::span<const double> x);

}  // namespace tda::nets
