#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tourscope {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// n x p observations with optional per-row labels and column names.
/// Construction validates that every entry is finite and that the label
/// vector, when present, has one entry per row.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values,
                        std::optional<std::vector<std::string>> labels = std::nullopt,
                        std::vector<std::string> col_names = {});

    Index n() const noexcept { return values_.rows(); }
    Index p() const noexcept { return values_.cols(); }

    const Matrix& values() const noexcept { return values_; }
    const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }
    const std::vector<std::string>& col_names() const noexcept { return col_names_; }

    /// Rows selected by `rows`, in the given order; labels follow.
    DataMatrix select_rows(const std::vector<Index>& rows) const;

private:
    Matrix values_;
    std::optional<std::vector<std::string>> labels_;
    std::vector<std::string> col_names_;
};

/// p x d matrix with orthonormal columns.
class ProjectionBasis {
public:
    static constexpr double kTolerance = 1e-10;

    /// Wraps `columns` after checking AᵀA = I to `tol`; throws RankDeficient otherwise.
    static ProjectionBasis from_orthonormal(Matrix columns, double tol = kTolerance);

    /// The first d columns of the p x p identity.
    static ProjectionBasis identity(Index p, Index d);

    Index p() const noexcept { return columns_.rows(); }
    Index d() const noexcept { return columns_.cols(); }
    const Matrix& matrix() const noexcept { return columns_; }

    /// max |AᵀA - I|
    double orthonormality_error() const;

    /// Orthogonal projector A·Aᵀ onto the spanned subspace.
    Matrix projector() const { return columns_ * columns_.transpose(); }

    bool operator==(const ProjectionBasis& other) const { return columns_ == other.columns_; }

private:
    explicit ProjectionBasis(Matrix columns) : columns_(std::move(columns)) {}

    Matrix columns_;
};

/// max |AᵀA - I| for an arbitrary matrix.
double orthonormality_error(const Matrix& a);

}  // namespace tourscope
