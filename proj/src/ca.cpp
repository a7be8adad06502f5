#include "tourscope/ca.hpp"

#include "tourscope/error.hpp"
#include "tourscope/linalg.hpp"

#include <cmath>

namespace tourscope {
namespace {

constexpr double kSingularFloor = 1e-10;

void check_table(const Matrix& f) {
    if (f.rows() < 1 || f.cols() < 1) throw Error(ErrorCode::DegenerateInput, "empty table");
    if (!f.allFinite()) throw Error(ErrorCode::NonFinite, "table has non-finite entries");
    if ((f.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "table entries must be non-negative");
    for (Index i = 0; i < f.rows(); ++i) {
        if (!(f.row(i).sum() > 0.0)) throw Error(ErrorCode::EmptyMargin, "row " + std::to_string(i) + " sums to zero");
    }
    for (Index j = 0; j < f.cols(); ++j) {
        if (!(f.col(j).sum() > 0.0)) throw Error(ErrorCode::EmptyMargin, "column " + std::to_string(j) + " sums to zero");
    }
}

// Each row divided by its sum; all-zero rows (no retained dimensions) stay zero.
Matrix row_shares(const Matrix& m) {
    Matrix out = m;
    for (Index i = 0; i < out.rows(); ++i) {
        const double s = out.row(i).sum();
        if (s > 0.0) out.row(i) /= s;
    }
    return out;
}

}  // namespace

Matrix standardized_residuals(const Matrix& f) {
    check_table(f);
    const Vector dr = f.rowwise().sum();
    const Vector dc = f.colwise().sum().transpose();
    const double n = dr.sum();
    const Matrix e = dr * dc.transpose() / n;
    const Vector rs = dr.array().rsqrt();
    const Vector cs = dc.array().rsqrt();
    return rs.asDiagonal() * (f - e) * cs.asDiagonal();
}

CaResult correspondence_analysis(const Matrix& f, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    const Matrix resid = standardized_residuals(f);
    const Vector dr = f.rowwise().sum();
    const Vector dc = f.colwise().sum().transpose();
    const double n = dr.sum();

    SvdOptions opts;
    opts.rank_tol = kSingularFloor;
    const SvdResult s = svd(resid, opts);

    CaResult out;
    out.alpha = alpha;
    out.total = n;
    out.sing_val = s.d;
    out.u = s.u;
    out.v = s.v;
    const Index k = s.rank();
    const Vector row_scale = (n / dr.array()).sqrt();
    const Vector col_scale = (n / dc.array()).sqrt();
    const Vector d_row = s.d.array().pow(alpha);
    const Vector d_col = s.d.array().pow(1.0 - alpha);
    out.row_scores = row_scale.asDiagonal() * s.u * d_row.asDiagonal();
    out.col_scores = col_scale.asDiagonal() * s.v * d_col.asDiagonal();

    out.row_inert.resize(f.rows(), k);
    for (Index i = 0; i < f.rows(); ++i) {
        for (Index j = 0; j < k; ++j) {
            out.row_inert(i, j) = (dr(i) / n) / std::pow(s.d(j), 2.0 * alpha) * out.row_scores(i, j) * out.row_scores(i, j);
        }
    }
    out.col_inert.resize(f.cols(), k);
    for (Index i = 0; i < f.cols(); ++i) {
        for (Index j = 0; j < k; ++j) {
            out.col_inert(i, j) = (dc(i) / n) / std::pow(s.d(j), 2.0 * (1.0 - alpha)) * out.col_scores(i, j) * out.col_scores(i, j);
        }
    }
    out.row_dist = row_shares(out.row_scores.array().square().matrix());
    out.col_dist = row_shares(out.col_scores.array().square().matrix());
    return out;
}

}  // namespace tourscope
