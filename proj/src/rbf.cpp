#include "tda/rbf.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "tda/rng.hpp"

namespace tda::nets {

void RbfParams::validate() const {
    if (centers.rows == 0 || centers.cols == 0)
        throw ValidationError("RbfParams.centers: empty");
    if (w2.rows != b2.size() || w2.cols != centers.rows)
        throw ValidationError("RbfParams: weight shapes inconsistent with centers");
    for (double v : centers.data)
        if (!std::isfinite(v)) throw ValidationError("RbfParams.centers: non-finite value");
}

double thin_plate_spline(double r) {
    if (r <= 0.0) return 0.0;
    const double r2 = r * r;
    return 0.5 * r2 * std::log(r2);  // r^2 ln r
}

std::vector<double> rbf_basis(const Matrix& centers, std::span<const double> x) {
    if (x.size() != centers.cols)
        throw ValidationError("rbf_basis: input length does not match center dimension");
    std::vector<double> phi(centers.rows);
    for (std::size_t j = 0; j < centers.rows; ++j) {
        const double* c = centers.data.data() + j * centers.cols;
        double r2 = 0.0;
        for (std::size_t i = 0; i < centers.cols; ++i) {
            const double d = x[i] - c[i];
            r2 += d * d;
        }
        phi[j] = r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0;
    }
    return phi;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

}  // namespace

Matrix kmeans_centers(const Matrix& X, int k, std::uint64_t seed, int iterations) {
    if (k < 1) throw ValidationError("kmeans_centers: k must be >= 1");
    if (static_cast<std::size_t>(k) > X.rows)
        throw ValidationError("kmeans_centers: k exceeds number of points");
    const std::size_t n = X.rows;
    const std::size_t d = X.cols;
    const std::size_t kk = static_cast<std::size_t>(k);

    GaussianGen gen(mix_seed(seed, 0xC3A57E25ULL));
    Matrix centers(kk, d);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);

    // k-means++ seeding: first center uniform, the rest D^2-weighted.
    std::size_t first = static_cast<std::size_t>(gen.next_u64() % n);
    std::copy_n(X.data.data() + first * d, d, centers.data.data());
    chosen[first] = 1;
    for (std::size_t c = 1; c < kk; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 =
                sq_dist(X.data.data() + i * d, centers.data.data() + (c - 1) * d, d);
            if (d2 < dist2[i]) dist2[i] = d2;
            total += dist2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = gen.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == n || chosen[pick]) {
            // degenerate weights (duplicated points); take first unchosen
            pick = 0;
            while (pick < n && chosen[pick]) ++pick;
            if (pick == n) pick = c % n;
        }
        chosen[pick] = 1;
        std::copy_n(X.data.data() + pick * d, d, centers.data.data() + c * d);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> sums(kk * d);
    std::vector<std::size_t> counts(kk);
    for (int it = 0; it < iterations; ++it) {
        bool changed = false;
#pragma omp parallel for schedule(static) reduction(|| : changed)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < kk; ++c) {
                const double d2 = sq_dist(X.data.data() + i * d, centers.data.data() + c * d, d);
                if (d2 < best) {
                    best = d2;
                    best_c = c;
                }
            }
            if (assign[i] != best_c) {
                assign[i] = best_c;
                changed = true;
            }
        }
        if (!changed && it > 0) break;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {  // index order: deterministic sums
            const std::size_t c = assign[i];
            ++counts[c];
            const double* x = X.data.data() + i * d;
            double* s = sums.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) s[j] += x[j];
        }
        for (std::size_t c = 0; c < kk; ++c) {
            if (counts[c] == 0) {
                // revive on the point farthest from its current center
                double worst = -1.0;
                std::size_t worst_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d2 = sq_dist(X.data.data() + i * d,
                                              centers.data.data() + assign[i] * d, d);
                    if (d2 > worst) {
                        worst = d2;
                        worst_i = i;
                    }
                }
                std::copy_n(X.data.data() + worst_i * d, d, centers.data.data() + c * d);
                assign[worst_i] = c;
            } else {
                const double inv = 1.0 / static_cast<double>(counts[c]);
                for (std::size_t j = 0; j < d; ++j) centers(c, j) = sums[c * d + j] * inv;
            }
        }
    }
    return centers;
}

namespace {

void solve_stage2(const Matrix& centers, const Matrix& X, const Matrix& Y, double ridge,
                  Matrix& w2, std::vector<double>& b2) {
    const std::size_t n = X.rows;
    const std::size_t m = centers.rows;
    const std::size_t k_out = Y.cols;

    // Design matrix: one TPS column per center plus a constant column.
    Matrix phi(n, m + 1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const std::vector<double> row = rbf_basis(centers, X.row(i));
        for (std::size_t j = 0; j < m; ++j) phi(i, j) = row[j];
        phi(i, m) = 1.0;
    }

    // Ridge solved as a stacked least-squares problem [Phi; sqrt(ridge) I]
    // via column-pivoted QR; stable even when the TPS columns are nearly
    // dependent.
    const double sr = std::sqrt(ridge);
    Eigen::MatrixXd a(n + m + 1, m + 1);
    a.setZero();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= m; ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phi(i, j);
    for (std::size_t j = 0; j <= m; ++j)
        a(static_cast<Eigen::Index>(n + j), static_cast<Eigen::Index>(j)) = sr;

    Eigen::MatrixXd rhs(n + m + 1, k_out);
    rhs.setZero();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < k_out; ++k)
            rhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = Y(i, k);

    const Eigen::MatrixXd sol = a.colPivHouseholderQr().solve(rhs);

    w2 = Matrix(k_out, m);
    b2.assign(k_out, 0.0);
    for (std::size_t k = 0; k < k_out; ++k) {
        for (std::size_t j = 0; j < m; ++j)
            w2(k, j) = sol(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        b2[k] = sol(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    }
}

}  // namespace

RbfParams rbf_train(const Matrix& X, const Matrix& Y, int num_centers, std::uint64_t seed,
                    double ridge) {
    if (X.rows == 0) throw ValidationError("rbf_train: X is empty");
    if (X.rows != Y.rows) throw ValidationError("rbf_train: X and Y row counts differ");
    if (num_centers < 1 || static_cast<std::size_t>(num_centers) > X.rows)
        throw ValidationError("rbf_train: num_centers must be in [1, rows]");
    if (!(ridge >= 0.0)) throw ValidationError("rbf_train: ridge must be >= 0");

    RbfParams p;
    p.centers = kmeans_centers(X, num_centers, seed);
    solve_stage2(p.centers, X, Y, ridge, p.w2, p.b2);
    return p;
}

void rbf_fit_weights(RbfParams& p, const Matrix& X, const Matrix& Y, double ridge) {
    p.validate();
    if (X.cols != p.centers.cols)
        throw ValidationError("rbf_fit_weights: X width does not match center dimension");
    if (X.rows != Y.rows) throw ValidationError("rbf_fit_weights: X and Y row counts differ");
    solve_stage2(p.centers, X, Y, ridge, p.w2, p.b2);
}

std::vector<double> rbf_forward(const RbfParams& p, std::span<const double> x) {
    p.validate();
    const std::vector<double> phi = rbf_basis(p.centers, x);
    std::vector<double> y(p.b2.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        double acc = p.b2[k];
        for (std::size_t j = 0; j < phi.size(); ++j) acc += p.w2(k, j) * phi[j];
        y[k] = acc;
    }
    return y;
}

}  // namespace tda::nets
