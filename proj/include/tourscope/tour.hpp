#pragma once

#include "tourscope/types.hpp"

#include <cstdint>
#include <optional>
#include <functional>
#include <utility>

namespace tourscope {

/// Haar-uniform p x d basis: orthonormalized matrix of standard normal draws.
ProjectionBasis random_basis(Index p, Index d, std::uint64_t seed);

/// Principal angles between span(a) and span(b), descending, in [0, pi/2].
Vector principal_angles(const ProjectionBasis& a, const ProjectionBasis& b);

/// Point at fraction t on the Grassmann geodesic from span(start) to span(end).
/// At t = 0 the result equals `start` column for column; at t = 1 it spans
/// span(end), with columns continuing the in-plane rotations.
ProjectionBasis geodesic_interpolate(const ProjectionBasis& start, const ProjectionBasis& end, double t);

/// Proposes the next target basis. `draw` counts proposals made so far.
using TargetProposal = std::function<ProjectionBasis(Index p, Index d, std::uint64_t seed, std::uint64_t draw)>;

/// The grand tour's Haar proposal: random_basis(p, d, derive_seed(seed, draw)).
TargetProposal haar_proposal();

struct TourConfig {
    Index p = 2;
    Index d = 2;
    std::uint64_t seed = 0;
    double step_angle = 0.05;   ///< radians per frame
    std::optional<Matrix> initial;   ///< starting basis; random when unset
};

/// Value state of a tour path. `current` is the last emitted basis;
/// geodesics run from `segment_start` to `target`.
struct TourPathState {
    ProjectionBasis initial;
    ProjectionBasis segment_start;
    ProjectionBasis current;
    ProjectionBasis target;
    Vector principal_angles;
    double fraction = 0.0;
    double step_angle = 0.05;
    std::uint64_t rng_seed = 0;
    std::uint64_t draws = 0;
    std::uint64_t first_target_draw = 0;
    std::uint64_t frame_index = 0;
    TargetProposal proposal;
};

/// Starts a path at `config.initial` (or a seeded random basis) with the
/// first target already drawn. Throws InvalidArgument on bad dimensions or step.
TourPathState make_tour(const TourConfig& config, TargetProposal proposal = haar_proposal());

/// Advances one frame. Returns the new state and the emitted basis.
std::pair<TourPathState, ProjectionBasis> next_frame(const TourPathState& state);

inline const ProjectionBasis& current_basis(const TourPathState& state) { return state.current; }

/// Rewinds to frame 0; the replayed sequence is identical to the original.
TourPathState reset(const TourPathState& state);

}  // namespace tourscope
