#include "tourscope/tsne.hpp"

#include "tourscope/error.hpp"
#include "tourscope/linalg.hpp"
#include "tourscope/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace tourscope {
namespace {

constexpr double kLossFloor = 1e-12;
constexpr double kMinGain = 0.01;
constexpr int kMaxBracketSteps = 200;

struct RowFit {
    double beta;
    double entropy_bits;
};

// Conditional distribution of row i at precision beta = 1/(2σ²). Distances
// are shifted by their minimum so large beta does not underflow.
double fill_row(const Matrix& d2, Index i, double beta, double shift, Eigen::Ref<Vector> out) {
    double total = 0.0;
    double weighted = 0.0;
    for (Index j = 0; j < d2.cols(); ++j) {
        if (j == i) {
            out(j) = 0.0;
            continue;
        }
        const double delta = d2(i, j) - shift;
        const double v = std::exp(-beta * delta);
        out(j) = v;
        total += v;
        weighted += v * delta;
    }
    out /= total;
    // H (nats) = log total + beta * E[delta]
    const double h_nats = std::log(total) + beta * weighted / total;
    return h_nats / std::numbers::ln2;
}

RowFit fit_row(const Matrix& d2, Index i, double target_bits, const CalibrationOptions& opt,
               Eigen::Ref<Vector> out) {
    double shift = std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (Index j = 0; j < d2.cols(); ++j) {
        if (j == i) continue;
        shift = std::min(shift, d2(i, j));
        mean += d2(i, j);
    }
    mean /= static_cast<double>(d2.cols() - 1);
    if (mean - shift <= 0.0 && mean <= 0.0) {
        throw Error(ErrorCode::DegenerateRow,
                    "point " + std::to_string(i) + " coincides with every other point");
    }

    // Entropy decreases as beta grows. Search in log beta.
    double log_beta = -std::log(std::max(mean - shift, std::numeric_limits<double>::min()));
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double h = fill_row(d2, i, std::exp(log_beta), shift, out);
    int bracket_steps = 0;
    int bisection_steps = 0;
    while (std::abs(h - target_bits) > opt.entropy_tol_bits) {
        if (h > target_bits) {
            lo = log_beta;
        } else {
            hi = log_beta;
        }
        if (std::isfinite(lo) && std::isfinite(hi)) {
            if (bisection_steps++ >= opt.max_bisection_steps) break;
            log_beta = 0.5 * (lo + hi);
        } else {
            if (bracket_steps++ >= kMaxBracketSteps) break;
            log_beta += std::isfinite(lo) ? std::numbers::ln2 : -std::numbers::ln2;
        }
        h = fill_row(d2, i, std::exp(log_beta), shift, out);
    }
    return {std::exp(log_beta), h};
}

}  // namespace

Matrix pairwise_sq_dists(const Matrix& x) {
    const Index n = x.rows();
    Matrix d2 = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double v = (x.row(i) - x.row(j)).squaredNorm();
            d2(i, j) = v;
            d2(j, i) = v;
        }
    }
    return d2;
}

Matrix pairwise_sq_dists(const DataMatrix& x) { return pairwise_sq_dists(x.values()); }

Calibration calibrate_sigmas(const Matrix& sq_dists, double perplexity, const CalibrationOptions& options) {
    const Index n = sq_dists.rows();
    if (sq_dists.cols() != n) throw Error(ErrorCode::DimensionMismatch, "distance matrix must be square");
    if (n < 2) throw Error(ErrorCode::DegenerateInput, "need at least two points");
    if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n))) {
        throw Error(ErrorCode::InfeasiblePerplexity,
                    "perplexity " + std::to_string(perplexity) + " must lie in (1, n) with n = " +
                        std::to_string(n));
    }
    const double target_bits = std::log2(perplexity);
    Calibration out{Vector(n), Matrix::Zero(n, n), Vector(n)};
    Vector row(n);
    for (Index i = 0; i < n; ++i) {
        const RowFit fit = fit_row(sq_dists, i, target_bits, options, row);
        out.conditional.row(i) = row.transpose();
        out.sigmas(i) = std::sqrt(1.0 / (2.0 * fit.beta));
        out.perplexity(i) = std::exp2(fit.entropy_bits);
    }
    return out;
}

Matrix symmetrize(const Matrix& conditional) {
    const double n = static_cast<double>(conditional.rows());
    Matrix p = (conditional + conditional.transpose()) / (2.0 * n);
    p.diagonal().setZero();
    return p;
}

LowDimAffinities low_dim_affinities(const Matrix& y) {
    const Index n = y.rows();
    LowDimAffinities out{Matrix::Zero(n, n), Matrix::Zero(n, n), 0.0};
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double w = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
            out.w(i, j) = w;
            out.w(j, i) = w;
            out.z += 2.0 * w;
        }
    }
    out.q = out.w / out.z;
    return out;
}

double kl_loss(const Matrix& p, const Matrix& q, double q_floor) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "P and Q differ in shape");
    }
    double loss = 0.0;
    for (Index i = 0; i < p.rows(); ++i) {
        for (Index j = 0; j < p.cols(); ++j) {
            if (i == j) continue;
            const double pij = p(i, j);
            if (pij <= 0.0) continue;
            const double qij = std::max(q(i, j), q_floor);
            if (!(qij > 0.0)) {
                throw Error(ErrorCode::NonFinite, "q is zero where p is positive at (" + std::to_string(i) +
                                                      ", " + std::to_string(j) + ")");
            }
            loss += pij * std::log(pij / qij);
        }
    }
    return std::max(loss, 0.0);
}

KlDecomposition kl_decomposition(const Matrix& p, const Matrix& y) {
    const LowDimAffinities aff = low_dim_affinities(y);
    KlDecomposition out;
    for (Index i = 0; i < p.rows(); ++i) {
        for (Index j = 0; j < p.cols(); ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            out.neg_log_w -= p(i, j) * std::log(aff.w(i, j));
            out.p_log_p += p(i, j) * std::log(p(i, j));
        }
    }
    out.log_z = std::log(aff.z);
    return out;
}

Matrix tsne_gradient(const Matrix& p, const Matrix& y) {
    const Index n = y.rows();
    const Index dims = y.cols();
    if (p.rows() != n || p.cols() != n) throw Error(ErrorCode::DimensionMismatch, "P must be n x n");
    const auto un = static_cast<std::size_t>(n);
    const auto ud = static_cast<std::size_t>(dims);

    std::vector<double> rows(un * ud);
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t k = 0; k < ud; ++k) rows[i * ud + k] = y(static_cast<Index>(i), static_cast<Index>(k));
    }
    std::vector<double> w(un * un, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = i + 1; j < un; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < ud; ++k) {
                const double diff = rows[i * ud + k] - rows[j * ud + k];
                d2 += diff * diff;
            }
            const double v = 1.0 / (1.0 + d2);
            w[i * un + j] = v;
            w[j * un + i] = v;
            z += 2.0 * v;
        }
    }
    std::vector<double> grad(un * ud, 0.0);
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = 0; j < un; ++j) {
            if (i == j) continue;
            const double wij = w[i * un + j];
            const double mult = (p(static_cast<Index>(i), static_cast<Index>(j)) - wij / z) * wij;
            for (std::size_t k = 0; k < ud; ++k) grad[i * ud + k] += mult * (rows[i * ud + k] - rows[j * ud + k]);
        }
    }
    Matrix out(n, dims);
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t k = 0; k < ud; ++k) out(static_cast<Index>(i), static_cast<Index>(k)) = 4.0 * grad[i * ud + k];
    }
    return out;
}

void TsneConfig::validate(Index n) const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
    if (!(perplexity > 1.0)) fail("perplexity must exceed 1");
    if (!(perplexity < static_cast<double>(n))) fail("perplexity must be below the number of points");
    if (output_dim < 1) fail("output_dim must be positive");
    if (n_iter < 0) fail("n_iter must be non-negative");
    if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
    if (!(early_exaggeration > 0.0)) fail("early_exaggeration must be positive");
    if (exaggeration_iters < 0) fail("exaggeration_iters must be non-negative");
    if (momentum_switch_iter < 0) fail("momentum_switch_iter must be non-negative");
    if (!(initial_momentum >= 0.0 && initial_momentum < 1.0)) fail("initial_momentum must lie in [0, 1)");
    if (!(final_momentum >= 0.0 && final_momentum < 1.0)) fail("final_momentum must lie in [0, 1)");
    if (initial_dims < 0) fail("initial_dims must be non-negative");
    if (loss_every < 1) fail("loss_every must be positive");
    if (const auto* r = std::get_if<RandomInit>(&init); r && !(r->sd > 0.0)) fail("init sd must be positive");
    if (const auto* r = std::get_if<PcaInit>(&init); r && !(r->sd > 0.0)) fail("init sd must be positive");
    if (const auto* g = std::get_if<GivenLayout>(&init)) {
        if (g->y0.rows() != n || g->y0.cols() != output_dim) fail("initial layout must be n x output_dim");
        if (!g->y0.allFinite()) fail("initial layout has non-finite entries");
    }
}

TsneModel run_tsne(const DataMatrix& x, const TsneConfig& config) {
    const Index n = x.n();
    if (n < 4) throw Error(ErrorCode::DegenerateInput, "t-SNE needs at least four points");
    config.validate(n);
    const Index dims = config.output_dim;

    Matrix input = x.values();
    const Index reduce_to = std::min<Index>(config.initial_dims, std::min(n - 1, x.p()));
    if (config.initial_dims > 0 && reduce_to < x.p()) input = pca(x, reduce_to).scores;

    const Calibration cal = calibrate_sigmas(pairwise_sq_dists(input), config.perplexity);
    TsneModel model;
    model.config = config;
    model.sigmas = cal.sigmas;
    model.p = symmetrize(cal.conditional);

    Matrix y(n, dims);
    if (const auto* r = std::get_if<RandomInit>(&config.init)) {
        Rng rng(config.seed);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < dims; ++j) y(i, j) = r->sd * rng.normal();
        }
    } else if (const auto* pc = std::get_if<PcaInit>(&config.init)) {
        if (dims > std::min(n - 1, x.p())) {
            throw Error(ErrorCode::ConfigInvalid, "PCA initialisation needs output_dim <= min(n - 1, p)");
        }
        y = pca(x, dims).scores;
        for (Index j = 0; j < dims; ++j) {
            const double mean = y.col(j).mean();
            const double sd = std::sqrt((y.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
            y.col(j) = (y.col(j).array() - mean) * (sd > 0.0 ? pc->sd / sd : 0.0);
        }
    } else {
        y = std::get<GivenLayout>(config.init).y0;
    }

    Matrix update = Matrix::Zero(n, dims);
    Matrix gains = Matrix::Ones(n, dims);
    auto record = [&](int iter) {
        model.loss_iterations.push_back(iter);
        model.loss_trace.push_back(kl_loss(model.p, low_dim_affinities(y).q, kLossFloor));
    };

    record(0);
    Matrix p_exaggerated = model.p * config.early_exaggeration;
    for (int iter = 0; iter < config.n_iter; ++iter) {
        const Matrix& p_now = iter < config.exaggeration_iters ? p_exaggerated : model.p;
        const double momentum = iter < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
        const Matrix grad = tsne_gradient(p_now, y);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < dims; ++j) {
                // Gains grow when the step keeps heading the same way.
                const bool same_sign = (grad(i, j) > 0.0) == (update(i, j) > 0.0);
                gains(i, j) = same_sign ? std::max(gains(i, j) * 0.8, kMinGain) : gains(i, j) + 0.2;
                update(i, j) = momentum * update(i, j) - config.learning_rate * gains(i, j) * grad(i, j);
            }
        }
        y += update;
        y.rowwise() -= y.colwise().mean();
        if ((iter + 1) % config.loss_every == 0) record(iter + 1);
    }
    if (model.loss_iterations.back() != config.n_iter) record(config.n_iter);
    model.y = std::move(y);
    return model;
}

}  // namespace tourscope
