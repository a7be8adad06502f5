#include "tourscope/diagnostics.hpp"

#include "tourscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace tourscope {
namespace {

void check_k(Index k, Index n) {
    if (k < 1 || k >= n) {
        throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " requires 1 <= k < n = " + std::to_string(n));
    }
}

void check_pair(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "row counts differ: " + std::to_string(x.rows()) + " vs " +
                                                      std::to_string(y.rows()));
    }
}

// Every other point ordered by (distance, index).
std::vector<Index> ordering(const Matrix& x, Index i) {
    std::vector<std::pair<double, Index>> d;
    d.reserve(static_cast<std::size_t>(x.rows() - 1));
    for (Index j = 0; j < x.rows(); ++j) {
        if (j != i) d.emplace_back((x.row(i) - x.row(j)).squaredNorm(), j);
    }
    std::sort(d.begin(), d.end());
    std::vector<Index> out;
    out.reserve(d.size());
    for (const auto& e : d) out.push_back(e.second);
    return out;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

NeighborGraph knn(const Matrix& x, Index k) {
    check_k(k, x.rows());
    NeighborGraph g;
    g.k = k;
    g.indices.resize(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) {
        std::vector<Index> order = ordering(x, i);
        order.resize(static_cast<std::size_t>(k));
        g.indices[static_cast<std::size_t>(i)] = std::move(order);
    }
    return g;
}

NeighborGraph knn(const DataMatrix& x, Index k) { return knn(x.values(), k); }

PreservationReport neighborhood_preservation(const Matrix& x, const Matrix& y, Index k) {
    check_pair(x, y);
    const NeighborGraph gx = knn(x, k);
    const NeighborGraph gy = knn(y, k);
    PreservationReport r;
    r.k = k;
    const auto n = static_cast<std::size_t>(x.rows());
    const double kd = static_cast<double>(k);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Index> a = gx.indices[i];
        std::vector<Index> b = gy.indices[i];
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::vector<Index> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        std::vector<Index> only_y;
        std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_y));
        std::vector<Index> only_x;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_x));
        const double overlap = static_cast<double>(common.size()) / kd;
        r.per_point_overlap.push_back(overlap);
        r.distortion_score.push_back(static_cast<double>(only_y.size()) / kd);
        r.diffusion_score.push_back(static_cast<double>(only_x.size()) / kd);
        total += overlap;
    }
    r.mean_overlap = total / static_cast<double>(n);
    return r;
}

std::vector<double> rank_preservation(const Matrix& x, const Matrix& y, Index k) {
    check_pair(x, y);
    check_k(k, x.rows());
    const Index n = x.rows();
    std::vector<double> out(static_cast<std::size_t>(n));
    std::vector<Index> rank_y(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const std::vector<Index> ox = ordering(x, i);
        const std::vector<Index> oy = ordering(y, i);
        for (std::size_t pos = 0; pos < oy.size(); ++pos) rank_y[static_cast<std::size_t>(oy[pos])] = static_cast<Index>(pos + 1);
        double sum = 0.0;
        for (Index pos = 0; pos < k; ++pos) {
            const Index j = ox[static_cast<std::size_t>(pos)];
            sum += std::abs(static_cast<double>((pos + 1) - rank_y[static_cast<std::size_t>(j)]));
        }
        out[static_cast<std::size_t>(i)] = sum / static_cast<double>(k);
    }
    return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error(ErrorCode::DimensionMismatch, "spearman needs two equal-length vectors of size >= 2");
    }
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    const double m = static_cast<double>(a.size() + 1) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - m) * (rb[i] - m);
        da += (ra[i] - m) * (ra[i] - m);
        db += (rb[i] - m) * (rb[i] - m);
    }
    if (da == 0.0 || db == 0.0) return da == db ? 1.0 : 0.0;
    return num / std::sqrt(da * db);
}

ClusterGeometry cluster_geometry(const Matrix& x, const Matrix& y, const std::vector<std::string>& labels) {
    check_pair(x, y);
    if (static_cast<Index>(labels.size()) != x.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "label count does not match row count");
    }
    std::map<std::string, std::vector<Index>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(static_cast<Index>(i));
    if (members.size() < 2) throw Error(ErrorCode::SingleClass, "cluster geometry needs at least two classes");

    ClusterGeometry g;
    const auto c = static_cast<Index>(members.size());
    g.centroids_x = Matrix::Zero(c, x.cols());
    g.centroids_y = Matrix::Zero(c, y.cols());
    Index row = 0;
    for (const auto& [name, idx] : members) {
        g.classes.push_back(name);
        for (Index i : idx) {
            g.centroids_x.row(row) += x.row(i);
            g.centroids_y.row(row) += y.row(i);
        }
        g.centroids_x.row(row) /= static_cast<double>(idx.size());
        g.centroids_y.row(row) /= static_cast<double>(idx.size());
        ++row;
    }
    std::vector<double> dx, dy;
    for (Index a = 0; a < c; ++a) {
        for (Index b = a + 1; b < c; ++b) {
            ClusterPair pr{g.classes[static_cast<std::size_t>(a)], g.classes[static_cast<std::size_t>(b)],
                           (g.centroids_x.row(a) - g.centroids_x.row(b)).norm(),
                           (g.centroids_y.row(a) - g.centroids_y.row(b)).norm()};
            dx.push_back(pr.dist_x);
            dy.push_back(pr.dist_y);
            g.pairs.push_back(std::move(pr));
        }
    }
    if (g.pairs.size() < 2) {
        g.degenerate = true;
        g.rank_correlation = 1.0;
    } else {
        g.rank_correlation = spearman(dx, dy);
    }
    return g;
}

std::set<Index> knn_brush(const std::set<Index>& selection, const NeighborGraph& graph) {
    std::set<Index> out = selection;
    for (Index i : selection) {
        if (i < 0 || i >= graph.n()) {
            throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(i) + " outside [0, " +
                                                        std::to_string(graph.n()) + ")");
        }
        const auto& nbrs = graph.indices[static_cast<std::size_t>(i)];
        out.insert(nbrs.begin(), nbrs.end());
    }
    return out;
}

}  // namespace tourscope
