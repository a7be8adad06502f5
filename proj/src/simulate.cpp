#include "tourscope/simulate.hpp"

#include "tourscope/csv.hpp"
#include "tourscope/error.hpp"
#include "tourscope/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace tourscope {
namespace {

constexpr int kMaxCenterAttempts = 1000;

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

LabeledDataset make_dataset(Matrix values, std::vector<int> labels,
                            std::optional<std::vector<int>> fine = std::nullopt,
                            std::optional<Matrix> truth = std::nullopt) {
    const Index p = values.cols();
    DataMatrix data(std::move(values), label_strings(labels), dim_names(p, "x"));
    return LabeledDataset{std::move(data), std::move(labels), std::move(fine), std::move(truth)};
}

}  // namespace

std::vector<std::string> label_strings(const std::vector<int>& labels) {
    std::vector<std::string> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(std::to_string(l));
    return out;
}

LabeledDataset LabeledDataset::select_rows(const std::vector<Index>& rows) const {
    auto pick = [&](const std::vector<int>& v) {
        std::vector<int> out;
        out.reserve(rows.size());
        for (Index r : rows) out.push_back(v[static_cast<std::size_t>(r)]);
        return out;
    };
    LabeledDataset out{data.select_rows(rows), pick(labels), std::nullopt, std::nullopt};
    if (fine_labels) out.fine_labels = pick(*fine_labels);
    if (ground_truth) {
        Matrix g(static_cast<Index>(rows.size()), ground_truth->cols());
        for (std::size_t i = 0; i < rows.size(); ++i) g.row(static_cast<Index>(i)) = ground_truth->row(rows[i]);
        out.ground_truth = std::move(g);
    }
    return out;
}

LabeledDataset gen_gaussian_clusters(const GaussianClusterParams& params) {
    require(params.k >= 1, "k must be positive");
    require(params.signal_dim >= 1, "signal_dim must be positive");
    require(params.signal_dim <= params.ambient_dim, "signal_dim must not exceed ambient_dim");
    require(params.n_per_cluster >= 1, "n_per_cluster must be positive");
    require(params.spread >= 0.0 && std::isfinite(params.spread), "spread must be non-negative");
    require(params.separation > 0.0 && std::isfinite(params.separation), "separation must be positive");
    require(params.ambient_noise_sd >= 0.0, "ambient_noise_sd must be non-negative");

    Rng rng(params.seed);
    std::vector<Vector> centers;
    for (int c = 0; c < params.k; ++c) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxCenterAttempts && !placed; ++attempt) {
            Vector cand(params.signal_dim);
            for (Index j = 0; j < params.signal_dim; ++j) cand(j) = params.separation * (2.0 * rng.uniform() - 1.0);
            placed = std::all_of(centers.begin(), centers.end(),
                                 [&](const Vector& other) { return (other - cand).norm() >= params.separation; });
            if (placed) centers.push_back(std::move(cand));
        }
        if (!placed) {
            throw Error(ErrorCode::SeparationInfeasible,
                        "could not place center " + std::to_string(c) + " after " +
                            std::to_string(kMaxCenterAttempts) + " attempts");
        }
    }

    const Index n = params.n_per_cluster * params.k;
    Matrix values = Matrix::Zero(n, params.ambient_dim);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Index row = 0;
    for (int c = 0; c < params.k; ++c) {
        for (Index i = 0; i < params.n_per_cluster; ++i, ++row) {
            for (Index j = 0; j < params.signal_dim; ++j) {
                values(row, j) = centers[static_cast<std::size_t>(c)](j) + params.spread * rng.normal();
            }
            labels[static_cast<std::size_t>(row)] = c;
        }
    }
    if (params.ambient_noise_sd > 0.0) {
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < params.ambient_dim; ++j) values(i, j) += params.ambient_noise_sd * rng.normal();
        }
    }
    return make_dataset(std::move(values), std::move(labels));
}

LabeledDataset gen_hierarchical_clusters(const HierarchicalParams& params) {
    require(params.ambient_dim >= 5, "ambient_dim must be at least 5");
    require(params.n_large >= 1 && params.n_sub_large >= 1 && params.n_small >= 1, "cluster sizes must be positive");
    require(params.large_sd >= 0.0 && params.small_sd >= 0.0, "standard deviations must be non-negative");
    require(params.outer_separation > 0.0 && params.sub_separation > 0.0 && params.small_spacing > 0.0,
            "separations must be positive");

    const Index p = params.ambient_dim;
    Rng rng(params.seed);

    // Top-level groups on an equilateral triangle in the (x1, x2) plane.
    const double s = params.outer_separation;
    Vector group_a = Vector::Zero(p);
    Vector group_b = Vector::Zero(p);
    group_b(0) = s;
    Vector group_c = Vector::Zero(p);
    group_c(0) = s / 2.0;
    group_c(1) = s * std::sqrt(3.0) / 2.0;

    // The hierarchical group lives in coordinates x3..x5.
    Vector sub_plain = group_c;
    sub_plain(2) -= params.sub_separation / 2.0;
    Vector sub_split = group_c;
    sub_split(2) += params.sub_separation / 2.0;
    const double circumradius = params.small_spacing / std::sqrt(3.0);
    std::vector<Vector> small_centers;
    for (int m = 0; m < 3; ++m) {
        const double phi = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * m / 3.0;
        Vector c = sub_split;
        c(3) += circumradius * std::cos(phi);
        c(4) += circumradius * std::sin(phi);
        small_centers.push_back(std::move(c));
    }

    const Index n = 2 * params.n_large + params.n_sub_large + 3 * params.n_small;
    Matrix values = Matrix::Zero(n, p);
    std::vector<int> coarse;
    std::vector<int> fine;
    Index row = 0;
    auto emit = [&](const Vector& center, Index count, double sd, Index first_dim, Index dims, int coarse_id,
                    int fine_id) {
        for (Index i = 0; i < count; ++i, ++row) {
            values.row(row) = center.transpose();
            for (Index j = first_dim; j < first_dim + dims; ++j) values(row, j) += sd * rng.normal();
            coarse.push_back(coarse_id);
            fine.push_back(fine_id);
        }
    };
    emit(group_a, params.n_large, params.large_sd, 0, p, 0, 0);
    emit(group_b, params.n_large, params.large_sd, 0, p, 1, 1);
    emit(sub_plain, params.n_sub_large, params.large_sd, 2, 3, 2, 2);
    for (int m = 0; m < 3; ++m) emit(small_centers[static_cast<std::size_t>(m)], params.n_small, params.small_sd, 2, 3, 2, 3 + m);
    return make_dataset(std::move(values), std::move(coarse), std::move(fine));
}

LabeledDataset gen_dla_tree(const DlaTreeParams& params) {
    require(params.branches >= 2, "branches must be at least 2");
    require(params.p >= 1, "p must be positive");
    require(params.n >= params.branches, "n must be at least the number of branches");
    require(params.noise_sd >= 0.0 && std::isfinite(params.noise_sd), "noise_sd must be non-negative");
    require(params.step > 0.0 && std::isfinite(params.step), "step must be positive");

    Rng rng(params.seed);
    const Index per_branch = params.n / params.branches;
    const Index backbone = per_branch + params.n % params.branches;
    Matrix truth(params.n, params.p);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(params.n));
    Index row = 0;
    for (int b = 0; b < params.branches; ++b) {
        const Index length = b == 0 ? backbone : per_branch;
        Vector point = Vector::Zero(params.p);
        if (b > 0) point = truth.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(row)))).transpose();
        for (Index i = 0; i < length; ++i, ++row) {
            if (i > 0) {
                for (Index j = 0; j < params.p; ++j) point(j) += params.step * rng.normal();
            }
            truth.row(row) = point.transpose();
            labels.push_back(b);
        }
    }
    Matrix values = truth;
    if (params.noise_sd > 0.0) {
        for (Index i = 0; i < values.rows(); ++i) {
            for (Index j = 0; j < values.cols(); ++j) values(i, j) += params.noise_sd * rng.normal();
        }
    }
    return make_dataset(std::move(values), std::move(labels), std::nullopt, std::move(truth));
}

std::vector<Index> weighted_subsample_indices(const std::vector<int>& labels, const SubsampleParams& params) {
    require(params.fraction > 0.0 && params.fraction <= 1.0, "fraction must lie in (0, 1]");
    require(params.damping >= 0.0 && std::isfinite(params.damping), "damping must be non-negative");
    require(params.min_per_class >= 0, "min_per_class must be non-negative");
    const auto n = static_cast<Index>(labels.size());
    if (n == 0) throw Error(ErrorCode::EmptyResult, "no rows to sample");

    std::map<int, std::vector<Index>> members;
    for (Index i = 0; i < n; ++i) members[labels[static_cast<std::size_t>(i)]].push_back(i);
    const auto classes = static_cast<Index>(members.size());
    if (params.fraction * static_cast<double>(n) < static_cast<double>(classes)) {
        throw Error(ErrorCode::EmptyResult, "fraction * n is below the number of classes");
    }
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    if (params.fraction >= 1.0) return all;

    const auto total = static_cast<Index>(std::llround(params.fraction * static_cast<double>(n)));
    std::vector<const std::vector<Index>*> rows;
    std::vector<double> weight;
    for (const auto& [label, idx] : members) {
        rows.push_back(&idx);
        weight.push_back(std::pow(static_cast<double>(idx.size()) / static_cast<double>(n), params.damping));
    }

    // Proportional allocation with caps at class size (water filling).
    const std::size_t c = rows.size();
    std::vector<double> alloc(c, 0.0);
    std::vector<bool> capped(c, false);
    for (bool changed = true; changed;) {
        changed = false;
        double remaining = static_cast<double>(total);
        double free_weight = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            if (capped[k]) remaining -= static_cast<double>(rows[k]->size());
            else free_weight += weight[k];
        }
        for (std::size_t k = 0; k < c; ++k) {
            if (capped[k]) {
                alloc[k] = static_cast<double>(rows[k]->size());
                continue;
            }
            alloc[k] = free_weight > 0.0 ? remaining * weight[k] / free_weight : 0.0;
            if (alloc[k] > static_cast<double>(rows[k]->size())) {
                capped[k] = true;
                changed = true;
            }
        }
    }

    // Largest-remainder rounding so the counts add up to `total`.
    std::vector<Index> count(c);
    Index assigned = 0;
    for (std::size_t k = 0; k < c; ++k) {
        count[k] = static_cast<Index>(std::floor(alloc[k]));
        assigned += count[k];
    }
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return alloc[a] - std::floor(alloc[a]) > alloc[b] - std::floor(alloc[b]);
    });
    for (std::size_t k : order) {
        if (assigned >= total) break;
        if (count[k] < static_cast<Index>(rows[k]->size())) {
            ++count[k];
            ++assigned;
        }
    }

    Rng rng(params.seed);
    std::vector<Index> picked;
    for (std::size_t k = 0; k < c; ++k) {
        const auto size = static_cast<Index>(rows[k]->size());
        const Index want = std::min(size, std::max(count[k], std::min(size, params.min_per_class)));
        std::vector<Index> pool = *rows[k];
        for (Index i = 0; i < want; ++i) {
            const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(size - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
            picked.push_back(pool[static_cast<std::size_t>(i)]);
        }
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

LabeledDataset weighted_subsample(const LabeledDataset& x, const SubsampleParams& params) {
    return x.select_rows(weighted_subsample_indices(x.labels, params));
}

}  // namespace tourscope
