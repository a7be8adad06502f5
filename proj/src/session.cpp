#include "tourscope/session.hpp"

#include "tourscope/error.hpp"
#include "tourscope/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tourscope {
namespace {

constexpr double kZoomMin = 0.01;
constexpr double kZoomMax = 100.0;

std::vector<std::string> vocabulary(const std::optional<std::vector<std::string>>& labels) {
    std::vector<std::string> out;
    if (!labels) return out;
    for (const auto& l : *labels) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
}

}  // namespace

void SessionConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
    if (embedding.rows() != tour_input.n()) {
        fail("embedding has " + std::to_string(embedding.rows()) + " rows, tour input has " +
             std::to_string(tour_input.n()));
    }
    if (embedding.cols() != 2) fail("embedding must have two columns");
    if (!embedding.allFinite()) fail("embedding has non-finite entries");
    if (d < 1 || d > tour_input.p()) fail("projection dimension must lie in [1, p]");
    if (!(step_angle > 0.0) || !std::isfinite(step_angle)) fail("step_angle must be positive");
    if (!(frames_per_second > 0.0) || !std::isfinite(frames_per_second)) fail("frames_per_second must be positive");
    if (subsample && !tour_input.labels()) fail("subsampling needs labels");
}

std::pair<SessionConfig, std::vector<Index>> apply_subsample(const SessionConfig& config) {
    std::vector<Index> rows(static_cast<std::size_t>(config.tour_input.n()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
    if (!config.subsample) return {config, rows};
    if (!config.tour_input.labels()) throw Error(ErrorCode::ConfigInvalid, "subsampling needs labels");

    // Weighted sampling works on class ids; map label strings to ids first.
    const auto& labels = *config.tour_input.labels();
    const std::vector<std::string> vocab = vocabulary(labels);
    std::vector<int> ids;
    ids.reserve(labels.size());
    for (const auto& l : labels) {
        ids.push_back(static_cast<int>(std::find(vocab.begin(), vocab.end(), l) - vocab.begin()));
    }
    rows = weighted_subsample_indices(ids, *config.subsample);
    Matrix emb(static_cast<Index>(rows.size()), config.embedding.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) emb.row(static_cast<Index>(i)) = config.embedding.row(rows[i]);
    SessionConfig out{config.tour_input.select_rows(rows), std::move(emb), config.d, config.step_angle,
                      config.frames_per_second, std::nullopt, config.seed};
    return {std::move(out), std::move(rows)};
}

namespace {

SessionConfig prepared(SessionConfig config) {
    config.validate();
    if (config.subsample) return apply_subsample(config).first;
    return config;
}

TourConfig tour_config(const SessionConfig& config) {
    TourConfig tc;
    tc.p = config.tour_input.p();
    tc.d = config.d;
    tc.seed = config.seed;
    tc.step_angle = config.step_angle;
    return tc;
}

}  // namespace

Session::Session(SessionConfig config)
    : config_(prepared(std::move(config))), state_(make_tour(tour_config(config_))) {
    const HalfRange hr = compute_half_range(config_.tour_input);
    display_data_ = hr.rescaled.array() - 0.5;
    state_.initial_half_range = hr.half_range;
    label_names_ = vocabulary(config_.tour_input.labels());
    reset_state();
}

void Session::reset_state() {
    state_.tour = make_tour(tour_config(config_));
    state_.playing = true;
    state_.half_range = state_.initial_half_range;
    state_.selection.clear();
    state_.selection_source = SelectionSource::None;
    state_.highlighted_labels.clear();
    state_.done = false;
}

std::string Session::meta_message() const {
    MetaFields m;
    m.n = n();
    m.d = config_.d;
    if (config_.tour_input.labels()) m.labels = *config_.tour_input.labels();
    m.label_names = label_names_;
    m.embedding = &config_.embedding;
    m.half_range = state_.half_range;
    return tourscope::meta_message(m);
}

Matrix Session::tour_coordinates() const {
    return project(display_data_, current_basis(state_.tour)) / state_.half_range;
}

std::string Session::frame_payload() const {
    const Matrix points = tour_coordinates();
    FrameFields f;
    f.frame = state_.tour.frame_index;
    f.basis = &current_basis(state_.tour).matrix();
    f.points = &points;
    f.selection = &state_.selection;
    f.highlight = &state_.highlighted_labels;
    return frame_message(f);
}

std::optional<std::string> Session::tick() {
    if (!state_.playing || state_.done) return std::nullopt;
    state_.tour = next_frame(state_.tour).first;
    return frame_payload();
}

std::set<Index> Session::points_in(View view, const Rect& rect) const {
    const Matrix coords = view == View::Tour ? tour_coordinates() : config_.embedding;
    std::set<Index> out;
    for (Index i = 0; i < coords.rows(); ++i) {
        if (rect.contains(coords(i, 0), coords.cols() > 1 ? coords(i, 1) : 0.0)) out.insert(i);
    }
    return out;
}

void Session::set_knn_brush(bool enabled, std::optional<NeighborGraph> graph) {
    if (graph && graph->n() != n()) {
        throw Error(ErrorCode::GraphSizeMismatch, "graph over " + std::to_string(graph->n()) + " points, session has " +
                                                      std::to_string(n()));
    }
    if (enabled && !graph && !state_.knn_graph) {
        throw Error(ErrorCode::InvalidArgument, "k-NN brushing needs a neighbour graph");
    }
    if (graph) state_.knn_graph = std::move(graph);
    state_.knn_brush = enabled;
}

std::vector<std::string> Session::handle(const Event& event) {
    if (state_.done) throw Error(ErrorCode::EventAfterDone, "session already finished");
    std::vector<std::string> out;
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Control>) {
                switch (e.action) {
                    case ControlAction::Play: state_.playing = true; break;
                    case ControlAction::Pause: state_.playing = false; break;
                    case ControlAction::Reset: reset_state(); break;
                    case ControlAction::Done: {
                        state_.playing = false;
                        state_.done = true;
                        DoneFields f{&current_basis(state_.tour).matrix(), &state_.selection, &state_.highlighted_labels};
                        out.push_back(done_message(f));
                        break;
                    }
                }
            } else if constexpr (std::is_same_v<T, Brush>) {
                state_.playing = false;
                std::set<Index> picked = points_in(e.view, e.rect);
                if (state_.knn_brush && state_.knn_graph) picked = knn_brush(picked, *state_.knn_graph);
                state_.selection = std::move(picked);
                state_.selection_source = e.view == View::Tour ? SelectionSource::Tour : SelectionSource::Embedding;
                out.push_back(frame_payload());
            } else if constexpr (std::is_same_v<T, BrushClear>) {
                state_.selection.clear();
                state_.selection_source = state_.highlighted_labels.empty() ? SelectionSource::None : SelectionSource::Legend;
                out.push_back(frame_payload());
            } else if constexpr (std::is_same_v<T, LegendToggle>) {
                if (std::find(label_names_.begin(), label_names_.end(), e.label) == label_names_.end()) {
                    throw Error(ErrorCode::InvalidArgument, "unknown label '" + e.label + "'");
                }
                if (!state_.highlighted_labels.erase(e.label)) state_.highlighted_labels.insert(e.label);
                if (state_.selection.empty()) {
                    state_.selection_source = state_.highlighted_labels.empty() ? SelectionSource::None : SelectionSource::Legend;
                }
                out.push_back(frame_payload());
            } else if constexpr (std::is_same_v<T, Zoom>) {
                state_.half_range = std::clamp(state_.half_range * e.factor, kZoomMin * state_.initial_half_range,
                                               kZoomMax * state_.initial_half_range);
                out.push_back(frame_payload());
            } else {
                if (e.enabled) {
                    if (e.k >= n()) throw Error(ErrorCode::KTooLarge, "k must be below n");
                    set_knn_brush(true, knn(config_.tour_input, e.k));
                } else {
                    set_knn_brush(false);
                }
                out.push_back(frame_payload());
            }
        },
        event);
    return out;
}

std::optional<DonePayload> Session::done_payload() const {
    if (!state_.done) return std::nullopt;
    return DonePayload{current_basis(state_.tour), state_.selection, state_.highlighted_labels};
}

std::vector<std::string> run_script(const SessionConfig& config, const std::vector<ScriptedEvent>& script,
                                    std::uint64_t ticks) {
    Session session(config);
    std::vector<std::string> transcript{session.meta_message()};
    std::vector<ScriptedEvent> ordered = script;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ScriptedEvent& a, const ScriptedEvent& b) { return a.after_tick < b.after_tick; });
    auto next = ordered.begin();
    for (std::uint64_t slot = 0; slot <= ticks; ++slot) {
        for (; next != ordered.end() && next->after_tick == slot; ++next) {
            try {
                for (auto& msg : session.handle(next->event)) transcript.push_back(std::move(msg));
            } catch (const Error& err) {
                transcript.push_back(error_message(to_string(err.code()), err.detail()));
            }
        }
        if (slot == ticks) break;
        if (auto frame = session.tick()) transcript.push_back(std::move(*frame));
    }
    return transcript;
}

}  // namespace tourscope
