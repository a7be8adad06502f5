#pragma once

#include "tourscope/types.hpp"

namespace tourscope {

/// Two-pass modified Gram-Schmidt. The first output column is the first input
/// column normalized; span is preserved column by column.
/// Throws RankDeficient when a residual norm drops below 1e-12.
ProjectionBasis orthonormalize(const Matrix& m);

/// Row i of the result is Aᵀ·x_i.
Matrix project(const DataMatrix& x, const ProjectionBasis& basis);
Matrix project(const Matrix& x, const ProjectionBasis& basis);

struct SvdResult {
    Matrix u;       ///< r x k, orthonormal columns
    Vector d;       ///< k singular values, non-increasing, all > rank_tol
    Matrix v;       ///< c x k, orthonormal columns
    double rank_tol = 1e-10;

    Index rank() const noexcept { return d.size(); }
    Matrix reconstruct() const { return u * d.asDiagonal() * v.transpose(); }
};

struct SvdOptions {
    double rank_tol = 1e-10;
    double tolerance = 1e-12;   ///< relative off-diagonal threshold for a rotation
    int max_sweeps = 60;
};

/// One-sided Jacobi SVD. Singular triplets with value <= rank_tol are dropped.
/// Each pair (u_k, v_k) is sign-normalized so the largest-magnitude entry of
/// u_k is positive. Throws NoConvergence after max_sweeps.
SvdResult svd(const Matrix& m, const SvdOptions& options = {});

/// Full SVD of a square matrix: no rank filtering, U and V square
/// orthogonal (null directions completed). Used for principal angles.
SvdResult svd_full(const Matrix& m, const SvdOptions& options = {});

struct PcaResult {
    Matrix components;          ///< p x k loadings (orthonormal columns)
    Vector explained_variance;  ///< all p eigenvalues, non-increasing
    Vector explained_ratio;     ///< explained_variance / total
    Vector center;              ///< column means
    Matrix scores;              ///< n x k, (X - center)·components

    /// Scores divided by the square root of their variance (zero-variance
    /// columns are left at zero).
    Matrix whitened_scores() const;
};

/// Principal components of the sample covariance (divisor n-1).
/// Requires n >= 2 and 1 <= k <= min(n-1, p).
PcaResult pca(const DataMatrix& x, Index k);

struct HalfRange {
    double half_range = 1.0;
    Matrix rescaled;   ///< each column min-max scaled onto [0, 1]
};

/// Per-column min-max rescale onto the unit cube (constant columns map to
/// 0.5); the half range is the largest distance of a rescaled row from the
/// cube center, or 1 when that distance is zero.
HalfRange compute_half_range(const DataMatrix& x);
HalfRange compute_half_range(const Matrix& x);

/// Flip `v` so its largest-magnitude entry is positive. Returns the sign applied.
double normalize_sign(Eigen::Ref<Vector> v);

}  // namespace tourscope
