#pragma once

#include "tourscope/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tourscope {

struct LabeledDataset {
    DataMatrix data;                        ///< labels carried as strings
    std::vector<int> labels;                ///< primary class id per row
    std::optional<std::vector<int>> fine_labels;
    std::optional<Matrix> ground_truth;     ///< noiseless coordinates when known

    Index n() const noexcept { return data.n(); }
    /// Rows in the given order; every label vector and ground truth follow.
    LabeledDataset select_rows(const std::vector<Index>& rows) const;
};

/// Integer labels rendered as the strings stored on the DataMatrix.
std::vector<std::string> label_strings(const std::vector<int>& labels);

struct GaussianClusterParams {
    int k = 5;
    Index signal_dim = 5;
    Index ambient_dim = 10;
    Index n_per_cluster = 100;
    double spread = 1.0;
    double separation = 10.0;
    double ambient_noise_sd = 0.0;   ///< optional isotropic noise over all coordinates
    std::uint64_t seed = 1;
};

/// k spherical clusters sharing the covariance spread²·I on a signal_dim
/// subspace, zero-padded to ambient_dim. Centers are rejection-sampled from
/// the cube [-separation, separation]^signal_dim until pairwise at least
/// `separation` apart; SeparationInfeasible after 1000 failed draws.
LabeledDataset gen_gaussian_clusters(const GaussianClusterParams& params);

struct HierarchicalParams {
    Index ambient_dim = 10;
    Index n_large = 200;        ///< points in each of the two top-level Gaussian clusters
    Index n_sub_large = 100;    ///< points in the plain 3-d sub-cluster
    Index n_small = 50;         ///< points in each of the three smallest clusters
    double large_sd = 1.0;
    double outer_separation = 15.0;   ///< distance between the three top-level groups
    double sub_separation = 6.0;      ///< distance between the two 3-d clusters
    double small_sd = 0.3;
    double small_spacing = 2.0;       ///< side of the equilateral triangle of small centers
    std::uint64_t seed = 1;
};

/// Two Gaussian clusters in the full ambient space plus a third group of
/// two 3-d clusters, the second of which splits into three equidistant
/// sub-clusters. `labels` are the 3 coarse groups; `fine_labels` the 6 clusters.
LabeledDataset gen_hierarchical_clusters(const HierarchicalParams& params);

struct DlaTreeParams {
    Index n = 3000;
    Index p = 100;
    int branches = 10;
    double noise_sd = 9.0;   ///< calibrated: 12 PCs carry ~70% of variance at the defaults
    double step = 1.0;
    std::uint64_t seed = 37;
};

/// Branching random walks: branch 0 starts at the origin, every later branch
/// starts on a uniformly chosen point of an earlier branch. Gaussian noise
/// of sd noise_sd is added on top of the stored ground truth.
LabeledDataset gen_dla_tree(const DlaTreeParams& params);

struct SubsampleParams {
    double fraction = 0.1;
    double damping = 0.5;
    Index min_per_class = 5;
    std::uint64_t seed = 1;
};

/// Class-stratified sample without replacement. Class c receives a share of
/// the round(fraction·n) draws proportional to (n_c/n)^damping (capped at
/// n_c, floored at min(n_c, min_per_class)). Rows keep their original order.
/// Throws EmptyResult when fraction·n is below the number of classes.
std::vector<Index> weighted_subsample_indices(const std::vector<int>& labels, const SubsampleParams& params);
LabeledDataset weighted_subsample(const LabeledDataset& x, const SubsampleParams& params);

}  // namespace tourscope
