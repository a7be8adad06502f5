#pragma once

#include "tourscope/types.hpp"

#include <set>
#include <string>
#include <vector>

namespace tourscope {

struct NeighborGraph {
    Index k = 0;
    /// indices[i] holds i's k nearest neighbours, nearest first.
    std::vector<std::vector<Index>> indices;

    Index n() const noexcept { return static_cast<Index>(indices.size()); }
};

/// Exact Euclidean k-NN; ties go to the lower row index. Throws KTooLarge
/// unless 1 <= k < n.
NeighborGraph knn(const Matrix& x, Index k);
NeighborGraph knn(const DataMatrix& x, Index k);

struct PreservationReport {
    Index k = 0;
    std::vector<double> per_point_overlap;   ///< |N_X(i) ∩ N_Y(i)| / k
    std::vector<double> distortion_score;    ///< share of Y-neighbours that are not X-neighbours
    std::vector<double> diffusion_score;     ///< share of X-neighbours that are not Y-neighbours
    double mean_overlap = 0.0;
};

/// Throws DimensionMismatch when X and Y have different row counts.
PreservationReport neighborhood_preservation(const Matrix& x, const Matrix& y, Index k);

/// Per point, the mean over its k nearest X-neighbours j of
/// |rank_X(i, j) - rank_Y(i, j)| (1-based ranks, ties by index).
std::vector<double> rank_preservation(const Matrix& x, const Matrix& y, Index k);

struct ClusterPair {
    std::string a;
    std::string b;
    double dist_x = 0.0;
    double dist_y = 0.0;
};

struct ClusterGeometry {
    std::vector<std::string> classes;    ///< sorted class names
    Matrix centroids_x;
    Matrix centroids_y;
    std::vector<ClusterPair> pairs;      ///< (a, b) with a < b in class order
    double rank_correlation = 1.0;       ///< Spearman between dist_x and dist_y
    bool degenerate = false;             ///< fewer than two pairs; correlation reported as 1
};

/// Throws SingleClass with fewer than two classes.
ClusterGeometry cluster_geometry(const Matrix& x, const Matrix& y, const std::vector<std::string>& labels);

/// Spearman correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// selection ∪ neighbours of every selected point. Throws IndexOutOfRange.
std::set<Index> knn_brush(const std::set<Index>& selection, const NeighborGraph& graph);

}  // namespace tourscope
