#pragma once

#include "tourscope/types.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace tourscope {

/// Squared Euclidean distances between all rows; exact zero diagonal.
Matrix pairwise_sq_dists(const Matrix& x);
Matrix pairwise_sq_dists(const DataMatrix& x);

struct Calibration {
    Vector sigmas;             ///< per-point Gaussian bandwidths
    Matrix conditional;        ///< row i holds p_{j|i}; rows sum to 1, zero diagonal
    Vector perplexity;         ///< achieved 2^H per point
};

struct CalibrationOptions {
    double entropy_tol_bits = 1e-5;
    int max_bisection_steps = 50;
};

/// Per-point bandwidth search so each conditional distribution has entropy
/// log2(perplexity). Throws InfeasiblePerplexity unless 1 < perplexity < n,
/// DegenerateRow when a point coincides with every other point.
Calibration calibrate_sigmas(const Matrix& sq_dists, double perplexity, const CalibrationOptions& options = {});

/// p_ij = (p_{j|i} + p_{i|j}) / 2n
Matrix symmetrize(const Matrix& conditional);

struct LowDimAffinities {
    Matrix q;   ///< w / z, zero diagonal
    Matrix w;   ///< Cauchy kernel 1 / (1 + |y_i - y_j|²), zero diagonal
    double z = 0.0;
};

LowDimAffinities low_dim_affinities(const Matrix& y);

/// Σ p log(p/q) over pairs with p > 0. A positive `q_floor` clamps q from
/// below; with the default of 0 a q of zero where p > 0 throws NonFinite.
double kl_loss(const Matrix& p, const Matrix& q, double q_floor = 0.0);

/// The loss split as written in attraction/repulsion form:
/// KL = -Σ p log w + log Σ w + Σ p log p.
struct KlDecomposition {
    double neg_log_w = 0.0;      ///< -Σ p_ij log w_ij
    double log_z = 0.0;          ///< log Σ w_ij
    double p_log_p = 0.0;        ///< Σ p_ij log p_ij (constant in Y)
    double total() const { return neg_log_w + log_z + p_log_p; }
};

KlDecomposition kl_decomposition(const Matrix& p, const Matrix& y);

/// dKL/dy_i = 4 Σ_j (p_ij - q_ij) w_ij (y_i - y_j)
Matrix tsne_gradient(const Matrix& p, const Matrix& y);

struct RandomInit {
    double sd = 1e-4;
};
struct PcaInit {
    double sd = 1e-4;   ///< each PC score column rescaled to this standard deviation
};
struct GivenLayout {
    Matrix y0;
};
using TsneInit = std::variant<RandomInit, PcaInit, GivenLayout>;

struct TsneConfig {
    double perplexity = 30.0;
    Index output_dim = 2;
    int n_iter = 1000;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    int exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iter = 250;
    /// Reduce the input to this many principal components first (0 disables).
    Index initial_dims = 50;
    TsneInit init = RandomInit{};
    std::uint64_t seed = 42;
    int loss_every = 10;

    /// Throws ConfigInvalid naming the offending field.
    void validate(Index n) const;
};

struct TsneModel {
    Matrix p;                       ///< joint similarities
    Vector sigmas;
    Matrix y;                       ///< n x output_dim layout
    std::vector<int> loss_iterations;
    std::vector<double> loss_trace;    ///< KL on the un-exaggerated P
    TsneConfig config;
};

/// Exact t-SNE: distances, calibration, symmetrization, then momentum
/// gradient descent with early exaggeration and per-coordinate gains.
/// Deterministic for a given seed.
TsneModel run_tsne(const DataMatrix& x, const TsneConfig& config);

}  // namespace tourscope
