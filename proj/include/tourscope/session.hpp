#pragma once

#include "tourscope/diagnostics.hpp"
#include "tourscope/protocol.hpp"
#include "tourscope/simulate.hpp"
#include "tourscope/tour.hpp"
#include "tourscope/types.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tourscope {

struct SessionConfig {
    DataMatrix tour_input;      ///< typically PCA scores; labels drive the legend
    Matrix embedding;           ///< n x 2 layout shown beside the tour
    Index d = 2;
    double step_angle = 0.05;
    double frames_per_second = 30.0;
    std::optional<SubsampleParams> subsample;
    std::uint64_t seed = 0;

    /// Throws ConfigInvalid.
    void validate() const;
};

/// Applies `config.subsample` (if any) to the tour input and the embedding
/// with one shared row selection. Requires labels. Returns the config with
/// `subsample` cleared, plus the kept original row indices.
std::pair<SessionConfig, std::vector<Index>> apply_subsample(const SessionConfig& config);

enum class SelectionSource { None, Tour, Embedding, Legend };

struct SessionState {
    explicit SessionState(TourPathState path) : tour(std::move(path)) {}

    TourPathState tour;
    bool playing = true;
    double half_range = 1.0;
    double initial_half_range = 1.0;
    std::set<Index> selection;
    SelectionSource selection_source = SelectionSource::None;
    std::set<std::string> highlighted_labels;
    bool done = false;
    bool knn_brush = false;
    std::optional<NeighborGraph> knn_graph;
};

struct DonePayload {
    ProjectionBasis basis;
    std::set<Index> selection;
    std::set<std::string> highlight;
};

/// One live session. All mutation goes through tick() and handle(); the
/// owner serializes calls, so every observable state corresponds to some
/// sequential order of ticks and events.
class Session {
public:
    explicit Session(SessionConfig config);

    std::string meta_message() const;

    /// Advances the tour one frame when playing; returns the frame message.
    /// Paused or finished sessions return nothing.
    std::optional<std::string> tick();

    /// Applies an event and returns the messages it produces: a refreshed
    /// frame (same frame index) for brush, clear, legend, zoom and k-NN
    /// toggles; the done payload for Control(done). Throws EventAfterDone
    /// once the session has finished.
    std::vector<std::string> handle(const Event& event);

    /// Enables or disables one-to-many brushing over `graph`.
    /// Throws GraphSizeMismatch when the graph is over a different n.
    void set_knn_brush(bool enabled, std::optional<NeighborGraph> graph = std::nullopt);

    std::string frame_payload() const;

    /// Tour-view coordinates of the current frame, divided by the half range.
    Matrix tour_coordinates() const;
    const Matrix& embedding() const noexcept { return config_.embedding; }

    const SessionState& state() const noexcept { return state_; }
    const SessionConfig& config() const noexcept { return config_; }
    std::optional<DonePayload> done_payload() const;

    Index n() const noexcept { return config_.tour_input.n(); }

private:
    void reset_state();
    std::set<Index> points_in(View view, const Rect& rect) const;

    SessionConfig config_;
    Matrix display_data_;   ///< rescaled tour input, centered on the cube center
    SessionState state_;
    std::vector<std::string> label_names_;
};

/// Event applied once `after_tick` ticks of the frame clock have elapsed
/// (0 = right after the meta message). Paused ticks still count.
struct ScriptedEvent {
    std::uint64_t after_tick = 0;
    Event event;
};

/// Deterministic transcript: meta, then for each clock tick the scripted
/// events due before it followed by the tick itself. Errors raised by events
/// become error messages in the transcript.
std::vector<std::string> run_script(const SessionConfig& config, const std::vector<ScriptedEvent>& script,
                                    std::uint64_t ticks);

}  // namespace tourscope
