#include "tourscope/linalg.hpp"

#include "tourscope/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tourscope {
namespace {

constexpr double kResidualFloor = 1e-12;

// Index of the first entry whose magnitude is within a relative hair of the
// maximum, so exact ties resolve to the lowest index despite rounding.
Index dominant_index(const Vector& v) {
    const double max_abs = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= max_abs * (1.0 - 1e-9)) return i;
    }
    return 0;
}

// Extends the orthonormal columns of `partial` (r x k) to a full r x r basis
// using the coordinate vectors as candidates.
Matrix complete_basis(const Matrix& partial, Index r) {
    Matrix out(r, r);
    Index filled = partial.cols();
    out.leftCols(filled) = partial;
    for (Index e = 0; e < r && filled < r; ++e) {
        Vector cand = Vector::Unit(r, e);
        for (int pass = 0; pass < 2; ++pass) {
            for (Index j = 0; j < filled; ++j) cand -= out.col(j).dot(cand) * out.col(j);
        }
        const double norm = cand.norm();
        if (norm > 1e-8) out.col(filled++) = cand / norm;
    }
    return out;
}

struct JacobiOutput {
    Matrix u;   // column-scaled U·Σ before normalization
    Vector sigma;
    Matrix v;
};

// Hestenes one-sided Jacobi on a tall matrix (rows >= cols).
JacobiOutput one_sided_jacobi(Matrix a, const SvdOptions& options) {
    const Index c = a.cols();
    Matrix v = Matrix::Identity(c, c);
    bool converged = c < 2;
    for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
        bool rotated = false;
        for (Index p = 0; p + 1 < c; ++p) {
            for (Index q = p + 1; q < c; ++q) {
                const double alpha = a.col(p).squaredNorm();
                const double beta = a.col(q).squaredNorm();
                const double gamma = a.col(p).dot(a.col(q));
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= options.tolerance * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (Index i = 0; i < a.rows(); ++i) {
                    const double ap = a(i, p);
                    const double aq = a(i, q);
                    a(i, p) = cs * ap - sn * aq;
                    a(i, q) = sn * ap + cs * aq;
                }
                for (Index i = 0; i < c; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = cs * vp - sn * vq;
                    v(i, q) = sn * vp + cs * vq;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) {
        throw Error(ErrorCode::NoConvergence,
                    "Jacobi SVD did not converge in " + std::to_string(options.max_sweeps) + " sweeps");
    }
    Vector sigma(c);
    for (Index j = 0; j < c; ++j) sigma(j) = a.col(j).norm();
    return {std::move(a), std::move(sigma), std::move(v)};
}

SvdResult svd_impl(const Matrix& m, const SvdOptions& options, bool full) {
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "svd input has non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) {
        return SvdResult{Matrix(m.rows(), 0), Vector(0), Matrix(m.cols(), 0), options.rank_tol};
    }
    const bool transposed = m.rows() < m.cols();
    JacobiOutput jac = one_sided_jacobi(transposed ? Matrix(m.transpose()) : m, options);

    std::vector<Index> order(static_cast<std::size_t>(jac.sigma.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return jac.sigma(a) > jac.sigma(b); });

    std::vector<Index> kept;
    for (Index j : order) {
        if (full || jac.sigma(j) > options.rank_tol) kept.push_back(j);
    }
    const Index k = static_cast<Index>(kept.size());
    const Index rows = jac.u.rows();
    Matrix left(rows, k);
    Matrix right(jac.v.rows(), k);
    Vector d(k);
    // In full mode, near-null directions are rebuilt by completion rather
    // than divided by a vanishing singular value.
    const double null_tol = full && k > 0 ? 1e-12 * std::max(1.0, jac.sigma(kept.front())) : 0.0;
    Index nonzero = 0;
    for (Index col = 0; col < k; ++col) {
        const Index j = kept[static_cast<std::size_t>(col)];
        d(col) = jac.sigma(j);
        right.col(col) = jac.v.col(j);
        if (d(col) > null_tol) {
            left.col(col) = jac.u.col(j) / d(col);
            ++nonzero;
        } else {
            left.col(col).setZero();
        }
    }
    if (full && nonzero < k) {
        // Zero singular values: complete U from the columns already found.
        Matrix completed = complete_basis(left.leftCols(nonzero), rows);
        left.rightCols(k - nonzero) = completed.middleCols(nonzero, k - nonzero);
    }

    for (Index col = 0; col < k; ++col) {
        const Vector ucol = left.col(col);
        const double sign = ucol(dominant_index(ucol)) < 0.0 ? -1.0 : 1.0;
        left.col(col) *= sign;
        right.col(col) *= sign;
    }

    if (transposed) return SvdResult{std::move(right), std::move(d), std::move(left), options.rank_tol};
    return SvdResult{std::move(left), std::move(d), std::move(right), options.rank_tol};
}

}  // namespace

double normalize_sign(Eigen::Ref<Vector> v) {
    if (v.size() == 0) return 1.0;
    const double sign = v(dominant_index(v)) < 0.0 ? -1.0 : 1.0;
    v *= sign;
    return sign;
}

ProjectionBasis orthonormalize(const Matrix& m) {
    if (m.cols() < 1 || m.rows() < m.cols()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "orthonormalize needs p >= d >= 1, got " + std::to_string(m.rows()) + " x " +
                        std::to_string(m.cols()));
    }
    Matrix q = m;
    for (Index j = 0; j < q.cols(); ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        }
        const double norm = q.col(j).norm();
        if (!(norm >= kResidualFloor)) {
            throw Error(ErrorCode::RankDeficient,
                        "column " + std::to_string(j) + " is linearly dependent on earlier columns");
        }
        q.col(j) /= norm;
    }
    return ProjectionBasis::from_orthonormal(std::move(q));
}

Matrix project(const Matrix& x, const ProjectionBasis& basis) {
    if (x.cols() != basis.p()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "data has " + std::to_string(x.cols()) + " columns, basis expects " +
                        std::to_string(basis.p()));
    }
    return x * basis.matrix();
}

Matrix project(const DataMatrix& x, const ProjectionBasis& basis) {
    return project(x.values(), basis);
}

SvdResult svd(const Matrix& m, const SvdOptions& options) { return svd_impl(m, options, false); }

SvdResult svd_full(const Matrix& m, const SvdOptions& options) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "svd_full expects a square matrix");
    return svd_impl(m, options, true);
}

Matrix PcaResult::whitened_scores() const {
    Matrix out = scores;
    for (Index j = 0; j < out.cols(); ++j) {
        const double var = explained_variance(j);
        if (var > 0.0) {
            out.col(j) /= std::sqrt(var);
        } else {
            out.col(j).setZero();
        }
    }
    return out;
}

PcaResult pca(const DataMatrix& x, Index k) {
    const Index n = x.n();
    const Index p = x.p();
    if (n < 2) throw Error(ErrorCode::DegenerateInput, "pca needs at least two observations");
    if (k < 1 || k > std::min(n - 1, p)) {
        throw Error(ErrorCode::InvalidArgument,
                    "component count " + std::to_string(k) + " outside [1, " +
                        std::to_string(std::min(n - 1, p)) + "]");
    }
    PcaResult out;
    out.center = x.values().colwise().mean().transpose();
    const Matrix centered = x.values().rowwise() - out.center.transpose();
    const Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "covariance eigensolver failed");
    // Eigen returns ascending eigenvalues.
    out.explained_variance = eig.eigenvalues().reverse().cwiseMax(0.0);
    const double total = out.explained_variance.sum();
    out.explained_ratio = total > 0.0 ? Vector(out.explained_variance / total) : Vector::Zero(p);

    out.components.resize(p, k);
    for (Index j = 0; j < k; ++j) {
        Vector col = eig.eigenvectors().col(p - 1 - j);
        normalize_sign(col);
        out.components.col(j) = col;
    }
    out.scores = centered * out.components;
    return out;
}

HalfRange compute_half_range(const Matrix& x) {
    HalfRange out;
    out.rescaled.resize(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const double lo = x.col(j).minCoeff();
        const double hi = x.col(j).maxCoeff();
        if (hi > lo) {
            out.rescaled.col(j) = (x.col(j).array() - lo) / (hi - lo);
        } else {
            out.rescaled.col(j).setConstant(0.5);
        }
    }
    double max_dist = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
        max_dist = std::max(max_dist, (out.rescaled.row(i).array() - 0.5).matrix().norm());
    }
    out.half_range = max_dist > 0.0 ? max_dist : 1.0;
    return out;
}

HalfRange compute_half_range(const DataMatrix& x) { return compute_half_range(x.values()); }

}  // namespace tourscope
