#pragma once

#include "tourscope/types.hpp"

namespace tourscope {

/// Correspondence analysis of a non-negative contingency table.
struct CaResult {
    Matrix row_scores;      ///< R = n^½ D_r^-½ U D^α
    Matrix col_scores;      ///< C = n^½ D_c^-½ V D^(1-α)
    Vector sing_val;        ///< retained singular values (> 1e-10), non-increasing
    Matrix row_inert;       ///< per-row relative contribution to each dimension's inertia
    Matrix col_inert;
    Matrix row_dist;        ///< per-row share of reconstructed chi-square distance; rows sum to 1
    Matrix col_dist;
    Matrix u;               ///< left singular vectors of the standardized residuals
    Matrix v;               ///< right singular vectors
    double alpha = 0.5;
    double total = 0.0;     ///< n, the table total

    Index dims() const noexcept { return sing_val.size(); }
    /// Principal inertias D², one per retained dimension.
    Vector inertia() const { return sing_val.array().square(); }
};

/// Standardized residuals D_r^-½ (F - E) D_c^-½ under the independence model
/// E = n⁻¹ D_r 1 1ᵀ D_c.
Matrix standardized_residuals(const Matrix& f);

/// alpha = 1 gives the row principal solution, 0 the column principal
/// solution, 1/2 the symmetric one. Throws EmptyMargin on a zero row or
/// column sum, InvalidArgument on negative entries or alpha outside [0, 1].
CaResult correspondence_analysis(const Matrix& f, double alpha = 0.5);

}  // namespace tourscope
