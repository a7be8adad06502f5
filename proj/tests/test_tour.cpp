#include "tourscope/error.hpp"
#include "tourscope/linalg.hpp"
#include "tourscope/random.hpp"
#include "tourscope/tour.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tourscope;

namespace {

double projector_distance(const ProjectionBasis& a, const ProjectionBasis& b) {
    return (a.projector() - b.projector()).norm();
}

Vector unit(Index p, Index i) { return Vector::Unit(p, i); }

ProjectionBasis basis_of(std::initializer_list<Vector> cols) {
    Matrix m(cols.begin()->size(), static_cast<Index>(cols.size()));
    Index j = 0;
    for (const auto& c : cols) m.col(j++) = c;
    return ProjectionBasis::from_orthonormal(m);
}

}  // namespace

TEST_CASE("random_basis is orthogonal at full rank and deterministic") {
    const ProjectionBasis q = random_basis(5, 5, 11);
    CHECK(q.orthonormality_error() < 1e-10);
    CHECK(std::abs(std::abs(q.matrix().determinant()) - 1.0) < 1e-10);
    CHECK(random_basis(6, 2, 3) == random_basis(6, 2, 3));
    CHECK_FALSE(random_basis(6, 2, 3) == random_basis(6, 2, 4));
    CHECK_THROWS_AS(random_basis(2, 3, 0), Error);
}

TEST_CASE("random 1-d directions in R^3 average to zero") {
    Vector mean = Vector::Zero(3);
    for (std::uint64_t seed = 0; seed < 10000; ++seed) mean += random_basis(3, 1, seed).matrix().col(0);
    mean /= 10000.0;
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(mean(i)) < 0.05);
}

TEST_CASE("geodesic between identical bases stays put") {
    const ProjectionBasis a = random_basis(6, 2, 1);
    CHECK(principal_angles(a, a).cwiseAbs().maxCoeff() < 1e-7);
    for (double t : {0.0, 0.3, 1.0}) CHECK(projector_distance(geodesic_interpolate(a, a, t), a) < 1e-10);
}

TEST_CASE("geodesic from (e1,e2) to (e1,e3) at the midpoint") {
    const ProjectionBasis a = basis_of({unit(4, 0), unit(4, 1)});
    const ProjectionBasis b = basis_of({unit(4, 0), unit(4, 2)});
    const Vector angles = principal_angles(a, b);
    CHECK(angles(0) == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));
    CHECK(angles(1) == doctest::Approx(0.0));
    // Closed form: span{e1, (e2 + e3)/sqrt2}.
    const ProjectionBasis expected = basis_of({unit(4, 0), (unit(4, 1) + unit(4, 2)) / std::sqrt(2.0)});
    CHECK(projector_distance(geodesic_interpolate(a, b, 0.5), expected) < 1e-10);
    CHECK((geodesic_interpolate(a, b, 0.0).matrix() - a.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("geodesic endpoints reach the target span") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Index p = 3 + static_cast<Index>(seed % 18);
        const ProjectionBasis a = random_basis(p, 2, seed);
        const ProjectionBasis b = random_basis(p, 2, seed + 1000);
        const ProjectionBasis end = geodesic_interpolate(a, b, 1.0);
        CHECK((end.projector() - b.projector()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(end.orthonormality_error() < 1e-12);
        const ProjectionBasis mid = geodesic_interpolate(a, b, 0.37);
        // The midpoint sits 0.37 of the way along every principal angle.
        const Vector full = principal_angles(a, b);
        const Vector part = principal_angles(a, mid);
        CHECK((part - 0.37 * full).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("geodesic rejects mismatched shapes") {
    CHECK_THROWS_AS(geodesic_interpolate(random_basis(4, 2, 0), random_basis(5, 2, 0), 0.5), Error);
    CHECK_THROWS_AS(geodesic_interpolate(random_basis(4, 2, 0), random_basis(4, 2, 1), 1.5), Error);
}

namespace {

// Proposal that replays a fixed list of targets.
TargetProposal scripted(std::vector<ProjectionBasis> targets) {
    return [targets = std::move(targets)](Index, Index, std::uint64_t, std::uint64_t draw) {
        return targets[std::min<std::size_t>(draw, targets.size() - 1)];
    };
}

}  // namespace

TEST_CASE("next_frame reaches a right-angle target in two quarter-pi steps") {
    const ProjectionBasis a = basis_of({unit(4, 0), unit(4, 1)});
    const ProjectionBasis b = basis_of({unit(4, 0), unit(4, 2)});
    TourConfig cfg;
    cfg.p = 4;
    cfg.d = 2;
    cfg.step_angle = std::numbers::pi / 4.0;
    cfg.initial = a.matrix();
    TourPathState s = make_tour(cfg, scripted({b, a}));
    auto [s1, f1] = next_frame(s);
    CHECK(s1.fraction == doctest::Approx(0.5));
    CHECK(projector_distance(f1, b) > 0.1);
    auto [s2, f2] = next_frame(s1);
    CHECK(projector_distance(f2, b) < 1e-10);
    CHECK(s2.fraction == 0.0);
    CHECK(s2.frame_index == 2);
}

TEST_CASE("a step larger than the angle lands on the target at once") {
    const ProjectionBasis a = basis_of({unit(4, 0), unit(4, 1)});
    const ProjectionBasis b = basis_of({unit(4, 0), unit(4, 2)});
    TourConfig cfg;
    cfg.p = 4;
    cfg.d = 2;
    cfg.step_angle = 3.0;
    cfg.initial = a.matrix();
    auto [s1, f1] = next_frame(make_tour(cfg, scripted({b, a})));
    CHECK(projector_distance(f1, b) < 1e-10);
}

TEST_CASE("tour frames stay orthonormal and move continuously") {
    TourConfig cfg;
    cfg.p = 7;
    cfg.d = 2;
    cfg.seed = 5;
    cfg.step_angle = 0.05;
    TourPathState s = make_tour(cfg);
    ProjectionBasis prev = current_basis(s);
    for (int i = 0; i < 1000; ++i) {
        auto [next, frame] = next_frame(s);
        REQUIRE(frame.orthonormality_error() < 1e-8);
        REQUIRE(principal_angles(prev, frame)(0) <= cfg.step_angle + 1e-6);
        REQUIRE(current_basis(next) == frame);
        prev = frame;
        s = std::move(next);
    }
}

TEST_CASE("current_basis and reset replay the path") {
    TourConfig cfg;
    cfg.p = 5;
    cfg.d = 2;
    cfg.seed = 99;
    TourPathState s = make_tour(cfg);
    const ProjectionBasis initial = current_basis(s);
    std::vector<ProjectionBasis> first;
    for (int i = 0; i < 300; ++i) {
        s = next_frame(s).first;
        first.push_back(current_basis(s));
    }
    CHECK(current_basis(s).orthonormality_error() < 1e-10);
    TourPathState r = reset(s);
    CHECK(current_basis(r) == initial);
    CHECK(r.frame_index == 0);
    for (int i = 0; i < 300; ++i) {
        r = next_frame(r).first;
        REQUIRE(current_basis(r) == first[static_cast<std::size_t>(i)]);
    }
    // Same parameters from scratch give the same sequence.
    TourPathState fresh = make_tour(cfg);
    for (int i = 0; i < 300; ++i) fresh = next_frame(fresh).first;
    CHECK(current_basis(fresh) == first.back());
}

TEST_CASE("a full-dimensional tour does not stall") {
    TourConfig cfg;
    cfg.p = 3;
    cfg.d = 3;
    TourPathState s = make_tour(cfg);
    auto [next, frame] = next_frame(s);
    CHECK(next.frame_index == 1);
    CHECK(frame.orthonormality_error() < 1e-10);
}

TEST_CASE("make_tour validates its configuration") {
    TourConfig cfg;
    cfg.p = 3;
    cfg.d = 4;
    CHECK_THROWS_AS(make_tour(cfg), Error);
    cfg.d = 2;
    cfg.step_angle = 0.0;
    CHECK_THROWS_AS(make_tour(cfg), Error);
}
