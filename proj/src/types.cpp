#include "tourscope/types.hpp"

#include "tourscope/error.hpp"

#include <cmath>

namespace tourscope {

DataMatrix::DataMatrix(Matrix values, std::optional<std::vector<std::string>> labels,
                       std::vector<std::string> col_names)
    : values_(std::move(values)), labels_(std::move(labels)), col_names_(std::move(col_names)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw Error(ErrorCode::DegenerateInput, "data matrix needs at least one row and one column");
    }
    if (!values_.allFinite()) {
        for (Index i = 0; i < values_.rows(); ++i) {
            for (Index j = 0; j < values_.cols(); ++j) {
                if (!std::isfinite(values_(i, j))) {
                    throw Error(ErrorCode::NonFinite, "entry (" + std::to_string(i) + ", " +
                                                          std::to_string(j) + ") is not finite");
                }
            }
        }
    }
    if (labels_ && static_cast<Index>(labels_->size()) != values_.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "label count " + std::to_string(labels_->size()) + " != row count " +
                        std::to_string(values_.rows()));
    }
    if (!col_names_.empty() && static_cast<Index>(col_names_.size()) != values_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "column name count does not match column count");
    }
}

DataMatrix DataMatrix::select_rows(const std::vector<Index>& rows) const {
    Matrix out(static_cast<Index>(rows.size()), p());
    std::optional<std::vector<std::string>> out_labels;
    if (labels_) out_labels.emplace();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] < 0 || rows[r] >= n()) {
            throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(rows[r]));
        }
        out.row(static_cast<Index>(r)) = values_.row(rows[r]);
        if (labels_) out_labels->push_back((*labels_)[static_cast<std::size_t>(rows[r])]);
    }
    return DataMatrix(std::move(out), std::move(out_labels), col_names_);
}

double orthonormality_error(const Matrix& a) {
    const Matrix gram = a.transpose() * a;
    return (gram - Matrix::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff();
}

ProjectionBasis ProjectionBasis::from_orthonormal(Matrix columns, double tol) {
    if (columns.cols() < 1 || columns.rows() < columns.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "basis must be p x d with 1 <= d <= p");
    }
    const double err = tourscope::orthonormality_error(columns);
    if (!(err < tol)) {
        throw Error(ErrorCode::RankDeficient,
                    "columns are not orthonormal (max deviation " + std::to_string(err) + ")");
    }
    return ProjectionBasis(std::move(columns));
}

ProjectionBasis ProjectionBasis::identity(Index p, Index d) {
    if (d < 1 || d > p) throw Error(ErrorCode::DimensionMismatch, "need 1 <= d <= p");
    return ProjectionBasis(Matrix::Identity(p, d));
}

double ProjectionBasis::orthonormality_error() const {
    return tourscope::orthonormality_error(columns_);
}

}  // namespace tourscope
