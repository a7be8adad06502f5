#include "tourscope/tour.hpp"

#include "tourscope/error.hpp"
#include "tourscope/linalg.hpp"
#include "tourscope/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tourscope {
namespace {

constexpr double kStallAngle = 1e-9;
constexpr int kMaxStallRedraws = 16;

ProjectionBasis gaussian_basis(Index p, Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(p, d);
    for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i < p; ++i) m(i, j) = rng.normal();
    }
    return orthonormalize(m);
}

struct Geodesic {
    Matrix from;     // start·W, principal vectors in span(start)
    Matrix toward;   // unit directions orthogonal to span(start)
    Vector angles;
    Matrix w;
};

Geodesic preproject(const ProjectionBasis& start, const ProjectionBasis& end) {
    if (start.p() != end.p() || start.d() != end.d()) {
        throw Error(ErrorCode::DimensionMismatch, "geodesic endpoints differ in shape");
    }
    const Matrix cross = start.matrix().transpose() * end.matrix();
    const SvdResult s = svd_full(cross);
    Geodesic g;
    g.w = s.u;
    g.from = start.matrix() * s.u;
    const Matrix end_frame = end.matrix() * s.v;
    const Index d = start.d();
    g.angles.resize(d);
    g.toward = Matrix::Zero(start.p(), d);
    for (Index k = 0; k < d; ++k) {
        const double c = std::clamp(s.d(k), 0.0, 1.0);
        g.angles(k) = std::acos(c);
        Vector dir = end_frame.col(k);
        for (int pass = 0; pass < 2; ++pass) {
            dir -= g.from * (g.from.transpose() * dir);
            for (Index j = 0; j < k; ++j) dir -= g.toward.col(j).dot(dir) * g.toward.col(j);
        }
        const double norm = dir.norm();
        if (norm > 1e-12 && g.angles(k) > 0.0) g.toward.col(k) = dir / norm;
    }
    return g;
}

ProjectionBasis along(const Geodesic& g, double t) {
    Matrix frame(g.from.rows(), g.from.cols());
    for (Index k = 0; k < frame.cols(); ++k) {
        const double angle = t * g.angles(k);
        frame.col(k) = std::cos(angle) * g.from.col(k) + std::sin(angle) * g.toward.col(k);
    }
    // Rotate back so t = 0 reproduces the starting columns exactly.
    Matrix out = frame * g.w.transpose();
    // Tidy rounding drift so orthonormality holds to machine precision.
    return orthonormalize(out);
}

void draw_target(TourPathState& s) {
    s.target = s.proposal(s.current.p(), s.current.d(), s.rng_seed, s.draws++);
    s.principal_angles = principal_angles(s.current, s.target);
}

}  // namespace

ProjectionBasis random_basis(Index p, Index d, std::uint64_t seed) {
    if (d < 1 || d > p) throw Error(ErrorCode::InvalidArgument, "random_basis needs 1 <= d <= p");
    try {
        return gaussian_basis(p, d, seed);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient) throw;
        return gaussian_basis(p, d, seed + 1);
    }
}

Vector principal_angles(const ProjectionBasis& a, const ProjectionBasis& b) {
    if (a.p() != b.p() || a.d() != b.d()) {
        throw Error(ErrorCode::DimensionMismatch, "bases differ in shape");
    }
    const SvdResult s = svd_full(a.matrix().transpose() * b.matrix());
    Vector angles(s.d.size());
    for (Index k = 0; k < s.d.size(); ++k) angles(k) = std::acos(std::clamp(s.d(k), 0.0, 1.0));
    // Cosines are descending, so angles come out ascending; report descending.
    return angles.reverse();
}

ProjectionBasis geodesic_interpolate(const ProjectionBasis& start, const ProjectionBasis& end, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "fraction must lie in [0, 1]");
    return along(preproject(start, end), t);
}

TargetProposal haar_proposal() {
    return [](Index p, Index d, std::uint64_t seed, std::uint64_t draw) {
        return random_basis(p, d, derive_seed(seed, draw));
    };
}

TourPathState make_tour(const TourConfig& config, TargetProposal proposal) {
    if (config.d < 1 || config.d > config.p) {
        throw Error(ErrorCode::InvalidArgument, "tour needs 1 <= d <= p");
    }
    if (!(config.step_angle > 0.0) || !std::isfinite(config.step_angle)) {
        throw Error(ErrorCode::InvalidArgument, "step_angle must be positive");
    }
    if (!proposal) throw Error(ErrorCode::InvalidArgument, "missing target proposal");

    std::uint64_t draws = 0;
    ProjectionBasis initial = config.initial
                                  ? orthonormalize(*config.initial)
                                  : proposal(config.p, config.d, config.seed, draws++);
    if (initial.p() != config.p || initial.d() != config.d) {
        throw Error(ErrorCode::DimensionMismatch, "initial basis shape does not match p x d");
    }
    TourPathState s{initial, initial, initial, initial, Vector::Zero(config.d), 0.0,
                    config.step_angle, config.seed, draws, draws, 0, std::move(proposal)};
    draw_target(s);
    return s;
}

std::pair<TourPathState, ProjectionBasis> next_frame(const TourPathState& state) {
    TourPathState s = state;
    for (int tries = 0; s.principal_angles(0) < kStallAngle && tries < kMaxStallRedraws; ++tries) {
        draw_target(s);
    }
    const double max_angle = s.principal_angles(0);
    if (max_angle < kStallAngle) {
        // Only reachable when d == p: every target spans the same space.
        ++s.frame_index;
        return {s, s.current};
    }

    s.fraction += s.step_angle / max_angle;
    ++s.frame_index;
    if (s.fraction >= 1.0 - 1e-12) {
        ProjectionBasis arrived = geodesic_interpolate(s.segment_start, s.target, 1.0);
        s.current = arrived;
        s.segment_start = arrived;
        s.fraction = 0.0;
        draw_target(s);
        return {s, arrived};
    }
    s.current = geodesic_interpolate(s.segment_start, s.target, s.fraction);
    return {s, s.current};
}

TourPathState reset(const TourPathState& state) {
    TourPathState s = state;
    s.segment_start = s.initial;
    s.current = s.initial;
    s.fraction = 0.0;
    s.frame_index = 0;
    s.draws = s.first_target_draw;
    draw_target(s);
    return s;
}

}  // namespace tourscope
