#include "tourscope/diagnostics.hpp"
#include "tourscope/error.hpp"
#include "tourscope/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace tourscope;

namespace {

Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    }
    return m;
}

Matrix column(std::initializer_list<double> v) {
    Matrix m(static_cast<Index>(v.size()), 1);
    Index i = 0;
    for (double x : v) m(i++, 0) = x;
    return m;
}

Matrix rotation2(double a) {
    Matrix r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

}  // namespace

TEST_CASE("knn on collinear points") {
    const NeighborGraph g = knn(column({0, 1, 3}), 1);
    CHECK(g.indices[0] == std::vector<Index>{1});
    CHECK(g.indices[1] == std::vector<Index>{0});
    CHECK(g.indices[2] == std::vector<Index>{1});
}

TEST_CASE("knn with k = n-1 lists every other point") {
    const NeighborGraph g = knn(random_matrix(6, 3, 1), 5);
    for (Index i = 0; i < 6; ++i) {
        std::vector<Index> sorted = g.indices[static_cast<std::size_t>(i)];
        std::sort(sorted.begin(), sorted.end());
        std::vector<Index> expected;
        for (Index j = 0; j < 6; ++j) {
            if (j != i) expected.push_back(j);
        }
        CHECK(sorted == expected);
    }
}

TEST_CASE("knn breaks ties by index") {
    Matrix dup(4, 1);
    dup << 0, 0, 0, 0;
    const NeighborGraph g = knn(dup, 2);
    CHECK(g.indices[0] == std::vector<Index>{1, 2});
    CHECK(g.indices[2] == std::vector<Index>{0, 1});
    CHECK(g.indices[3] == std::vector<Index>{0, 1});
}

TEST_CASE("knn matches a brute-force sort") {
    const Matrix x = random_matrix(40, 3, 9);
    const NeighborGraph g = knn(x, 7);
    for (Index i = 0; i < 40; ++i) {
        std::vector<Index> order;
        for (Index j = 0; j < 40; ++j) {
            if (j != i) order.push_back(j);
        }
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return (x.row(i) - x.row(a)).squaredNorm() < (x.row(i) - x.row(b)).squaredNorm();
        });
        order.resize(7);
        CHECK(g.indices[static_cast<std::size_t>(i)] == order);
    }
}

TEST_CASE("knn errors") {
    const Matrix x = random_matrix(5, 2, 1);
    for (Index k : {Index{0}, Index{5}, Index{9}}) {
        try {
            knn(x, k);
            FAIL("expected KTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::KTooLarge);
        }
    }
}

TEST_CASE("preservation of an identical or isometric layout is perfect") {
    const Matrix x = random_matrix(50, 2, 3);
    for (const Matrix& y : {Matrix(x), Matrix(x * rotation2(0.7)), Matrix((x * rotation2(2.0)).array() + 5.0)}) {
        const PreservationReport r = neighborhood_preservation(x, y, 10);
        CHECK(r.mean_overlap == 1.0);
        for (std::size_t i = 0; i < 50; ++i) {
            CHECK(r.per_point_overlap[i] == 1.0);
            CHECK(r.distortion_score[i] == 0.0);
            CHECK(r.diffusion_score[i] == 0.0);
        }
    }
}

TEST_CASE("overlap and distortion are complementary") {
    const Matrix x = random_matrix(60, 5, 4);
    const Matrix y = random_matrix(60, 2, 5);
    const PreservationReport r = neighborhood_preservation(x, y, 8);
    for (std::size_t i = 0; i < 60; ++i) {
        CHECK(r.distortion_score[i] + r.per_point_overlap[i] == doctest::Approx(1.0));
        CHECK(r.diffusion_score[i] + r.per_point_overlap[i] == doctest::Approx(1.0));
        CHECK(r.per_point_overlap[i] >= 0.0);
        CHECK(r.per_point_overlap[i] <= 1.0);
    }
    CHECK_THROWS_AS(neighborhood_preservation(x, y.topRows(10), 3), Error);
}

TEST_CASE("random pairing baseline is k/(n-1)") {
    const Index n = 200;
    const Index k = 10;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix x = random_matrix(n, 5, 1000 + seed);
        std::vector<Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Index{0});
        Rng rng(seed);
        for (Index i = n - 1; i > 0; --i) {
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
        }
        Matrix y(n, 5);
        for (Index i = 0; i < n; ++i) y.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
        const double m = neighborhood_preservation(x, y, k).mean_overlap;
        CHECK(std::abs(m - 10.0 / 199.0) < 0.03);
        total += m;
    }
    CHECK(std::abs(total / 20.0 - 10.0 / 199.0) < 0.03);
}

TEST_CASE("rank preservation") {
    const Matrix x = random_matrix(30, 3, 2);
    for (double v : rank_preservation(x, x, 5)) CHECK(v == 0.0);
    for (double v : rank_preservation(x, 2.0 * x, 5)) CHECK(v == 0.0);

    // Brute-force rank table, frozen from tests/oracles/compute_oracles.py.
    const std::vector<double> got = rank_preservation(column({0, 1, 3, 6}), column({0, 2.5, 2.0, 6}), 2);
    CHECK(got == std::vector<double>{1.0, 1.0, 0.0, 1.0});
}

TEST_CASE("cluster geometry") {
    const Matrix x = random_matrix(30, 2, 6);
    std::vector<std::string> labels;
    for (int i = 0; i < 30; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i % 3)));
    const ClusterGeometry iso = cluster_geometry(x, x * rotation2(1.1), labels);
    CHECK(iso.rank_correlation == doctest::Approx(1.0));
    CHECK(iso.classes == std::vector<std::string>{"a", "b", "c"});
    CHECK(iso.pairs.size() == 3);
    CHECK_FALSE(iso.degenerate);

    // Centroids (0,0),(1,0),(0,3) in X and (0,0),(4,0),(0,1) in Y.
    Matrix cx(3, 2), cy(3, 2);
    cx << 0, 0, 1, 0, 0, 3;
    cy << 0, 0, 4, 0, 0, 1;
    const ClusterGeometry adv = cluster_geometry(cx, cy, {"a", "b", "c"});
    CHECK(adv.rank_correlation == doctest::Approx(0.5));
    CHECK(adv.pairs[0].dist_x == doctest::Approx(1.0));
    CHECK(adv.pairs[0].dist_y == doctest::Approx(4.0));

    const ClusterGeometry two = cluster_geometry(cx, cy, {"a", "b", "a"});
    CHECK(two.degenerate);
    CHECK(two.rank_correlation == 1.0);
    try {
        cluster_geometry(cx, cy, {"a", "a", "a"});
        FAIL("expected SingleClass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClass);
    }
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 3, 2, 4}, {1, 2, 3, 4}) == doctest::Approx(0.8));
}

TEST_CASE("knn brush") {
    const Matrix x = random_matrix(20, 2, 8);
    const NeighborGraph g = knn(x, 3);
    CHECK(knn_brush({}, g).empty());
    const std::set<Index> one = knn_brush({4}, g);
    CHECK(one.size() <= 4);
    CHECK(one.count(4) == 1);
    for (Index j : g.indices[4]) CHECK(one.count(j) == 1);

    const Index a = 4;
    const Index b = g.indices[4][0];
    std::set<Index> oracle{a, b};
    oracle.insert(g.indices[static_cast<std::size_t>(a)].begin(), g.indices[static_cast<std::size_t>(a)].end());
    oracle.insert(g.indices[static_cast<std::size_t>(b)].begin(), g.indices[static_cast<std::size_t>(b)].end());
    CHECK(knn_brush({a, b}, g) == oracle);

    try {
        knn_brush({20}, g);
        FAIL("expected IndexOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
}
