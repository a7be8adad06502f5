#include "tourscope/embed.hpp"
#include "tourscope/error.hpp"
#include "tourscope/session.hpp"
#include "tourscope/simulate.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tourscope;
using nlohmann::json;

namespace {

SessionConfig small_config(std::uint64_t seed = 3) {
    GaussianClusterParams params;
    params.k = 3;
    params.signal_dim = 3;
    params.ambient_dim = 5;
    params.n_per_cluster = 10;
    const LabeledDataset ds = gen_gaussian_clusters(params);
    SessionConfig cfg{ds.data, pca_embed(ds.data, 2)};
    cfg.seed = seed;
    return cfg;
}

SessionConfig case_study_config() {
    const LabeledDataset ds = gen_gaussian_clusters(GaussianClusterParams{});
    SessionConfig cfg{ds.data, pca_embed(ds.data, 2)};
    cfg.seed = 11;
    return cfg;
}

std::vector<ScriptedEvent> golden_script() {
    return {
        {3, Brush{View::Embedding, Rect{-100, -100, 0, 100}}},
        {5, Control{ControlAction::Play}},
        {6, LegendToggle{"1"}},
        {7, Zoom{0.5}},
        {8, BrushClear{View::Embedding}},
        {9, LegendToggle{"nope"}},
        {10, Control{ControlAction::Reset}},
        {12, Brush{View::Tour, Rect{-0.2, -0.2, 0.2, 0.2}}},
        {13, Control{ControlAction::Done}},
        {14, Control{ControlAction::Play}},
    };
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::set<Index> brute_in_rect(const Matrix& coords, const Rect& r) {
    std::set<Index> out;
    for (Index i = 0; i < coords.rows(); ++i) {
        if (coords(i, 0) >= r.x0 && coords(i, 0) <= r.x1 && coords(i, 1) >= r.y0 && coords(i, 1) <= r.y1) out.insert(i);
    }
    return out;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("event parsing round-trips") {
    const std::vector<Event> events{
        Control{ControlAction::Play}, Control{ControlAction::Pause}, Control{ControlAction::Reset},
        Control{ControlAction::Done}, Brush{View::Tour, Rect{-1, -0.5, 0.25, 1}}, BrushClear{View::Embedding},
        LegendToggle{"a b"}, Zoom{1.5}, KnnBrushToggle{true, 7}};
    for (const Event& e : events) {
        const Event back = parse_event(serialize_event(e));
        CHECK(back.index() == e.index());
        CHECK(serialize_event(back) == serialize_event(e));
    }
    CHECK(serialize_event(Brush{View::Embedding, Rect{0, 1, 2, 3}}) ==
          R"({"type":"brush","view":"embedding","rect":[0.0,1.0,2.0,3.0]})");
    const auto legend = std::get<LegendToggle>(parse_event(R"({"type":"legend","label":3})"));
    CHECK(legend.label == "3");
    CHECK(std::get<KnnBrushToggle>(parse_event(R"({"type":"knn_brush","enabled":true})")).k == 10);
}

TEST_CASE("event parsing errors") {
    CHECK(code_of([] { parse_event("{"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_event(R"({"type":"warp"})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_event(R"({"type":"control","action":"jump"})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_event(R"({"type":"brush","view":"tour","rect":[1,0,0,1]})"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_event(R"({"type":"brush","view":"side","rect":[0,0,1,1]})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_event(R"({"type":"brush","view":"tour","rect":[0,0,1]})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_event(R"({"type":"zoom","factor":0})"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_event(R"({"type":"zoom","factor":"big"})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_event(R"({"type":"knn_brush","enabled":true,"k":0})"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("wire messages keep the field order and nine significant digits") {
    CHECK(wire_round(0.1234567891234) == 0.123456789);
    CHECK(wire_round(-2.0 / 3.0) == -0.666666667);

    Matrix emb(2, 2);
    emb << 1.0 / 3.0, 0, 2, -1;
    MetaFields m;
    m.n = 2;
    m.labels = {"a", "b"};
    m.label_names = {"a", "b"};
    m.embedding = &emb;
    m.half_range = 1.5;
    CHECK(meta_message(m) ==
          R"({"type":"meta","n":2,"d":2,"labels":["a","b"],"label_names":["a","b"],"embedding":[[0.333333333,0.0],[2.0,-1.0]],"half_range":1.5})");

    Matrix basis = Matrix::Identity(3, 2);
    Matrix pts(1, 2);
    pts << 0.5, -0.25;
    std::set<Index> sel{0};
    std::set<std::string> hl{"b"};
    FrameFields f{4, &basis, &pts, &sel, &hl};
    CHECK(frame_message(f) ==
          R"({"type":"frame","frame":4,"basis":[[1.0,0.0,0.0],[0.0,1.0,0.0]],"points":[[0.5,-0.25]],"selection":[0],"highlight":["b"]})");
    DoneFields d{&basis, &sel, &hl};
    CHECK(done_message(d) == R"({"type":"done","basis":[[1.0,0.0,0.0],[0.0,1.0,0.0]],"selection":[0],"highlight":["b"]})");
    CHECK(json::parse(error_message("ParseError", "x"))["type"] == "error");
}

TEST_CASE("session start: meta message and auto-play") {
    Session s(small_config());
    const json meta = json::parse(s.meta_message());
    CHECK(meta["type"] == "meta");
    CHECK(meta["n"] == 30);
    CHECK(meta["embedding"].size() == 30);
    CHECK(meta["labels"].size() == 30);
    CHECK(meta["label_names"] == json::array({"0", "1", "2"}));
    CHECK(s.state().playing);
    const auto first = s.tick();
    REQUIRE(first.has_value());
    CHECK(json::parse(*first)["frame"] == 1);
}

TEST_CASE("frame payload: coordinates inside the unit box, orthonormal basis") {
    Session s(case_study_config());
    for (int i = 0; i < 200; ++i) {
        const json frame = json::parse(*s.tick());
        Matrix b(5 * 0 + frame["basis"][0].size(), 2);
        for (Index r = 0; r < b.rows(); ++r) {
            b(r, 0) = frame["basis"][0][static_cast<std::size_t>(r)];
            b(r, 1) = frame["basis"][1][static_cast<std::size_t>(r)];
        }
        CHECK(orthonormality_error(b) < 1e-8);
        CHECK(s.tour_coordinates().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
        CHECK(frame["points"].size() == 500);
    }
}

TEST_CASE("brush on the embedding selects everything in the rect and pauses") {
    Session s(small_config());
    s.tick();
    const auto out = s.handle(Brush{View::Embedding, Rect{-1e9, -1e9, 1e9, 1e9}});
    CHECK_FALSE(s.state().playing);
    CHECK(s.state().selection.size() == 30);
    CHECK(s.state().selection_source == SelectionSource::Embedding);
    REQUIRE(out.size() == 1);
    const json frame = json::parse(out[0]);
    CHECK(frame["frame"] == 1);
    CHECK(frame["selection"].size() == 30);
    CHECK_FALSE(s.tick().has_value());
    CHECK(json::parse(s.frame_payload())["frame"] == 1);
}

TEST_CASE("brush in the tour view matches a point-in-rect oracle") {
    Session s(case_study_config());
    for (int i = 0; i < 40; ++i) s.tick();
    const Matrix coords = s.tour_coordinates();
    const Rect r{coords(0, 0) - 0.1, coords(0, 1) - 0.1, coords(0, 0) + 0.1, coords(0, 1) + 0.1};
    const auto out = s.handle(Brush{View::Tour, r});
    CHECK(s.state().selection == brute_in_rect(coords, r));
    CHECK(s.state().selection.count(0) == 1);
    CHECK(s.state().selection_source == SelectionSource::Tour);
    std::vector<Index> sent = json::parse(out[0])["selection"];
    CHECK(std::set<Index>(sent.begin(), sent.end()) == s.state().selection);
}

TEST_CASE("legend toggle is an involution; clear and zoom") {
    Session s(small_config());
    s.handle(LegendToggle{"2"});
    CHECK(s.state().highlighted_labels == std::set<std::string>{"2"});
    CHECK(s.state().selection_source == SelectionSource::Legend);
    s.handle(LegendToggle{"2"});
    CHECK(s.state().highlighted_labels.empty());
    CHECK(s.state().selection_source == SelectionSource::None);
    CHECK(code_of([&] { s.handle(LegendToggle{"7"}); }) == ErrorCode::InvalidArgument);

    s.handle(Brush{View::Embedding, Rect{-1e9, -1e9, 1e9, 1e9}});
    s.handle(BrushClear{View::Embedding});
    CHECK(s.state().selection.empty());

    const double hr0 = s.state().initial_half_range;
    s.handle(Zoom{2.0});
    CHECK(s.state().half_range == doctest::Approx(2.0 * hr0));
    s.handle(Zoom{1e6});
    CHECK(s.state().half_range == doctest::Approx(100.0 * hr0));
    s.handle(Zoom{1e-9});
    CHECK(s.state().half_range == doctest::Approx(0.01 * hr0));
}

TEST_CASE("done is terminal and returns the current basis") {
    Session s(small_config());
    for (int i = 0; i < 5; ++i) s.tick();
    const ProjectionBasis before = current_basis(s.state().tour);
    s.handle(LegendToggle{"0"});
    const auto out = s.handle(Control{ControlAction::Done});
    REQUIRE(out.size() == 1);
    const json done = json::parse(out[0]);
    CHECK(done["type"] == "done");
    CHECK(done["highlight"] == json::array({"0"}));
    CHECK(done["basis"].size() == 2);
    CHECK(done["basis"][0].size() == 5);
    REQUIRE(s.done_payload().has_value());
    CHECK(s.done_payload()->basis == before);
    CHECK_FALSE(s.state().playing);
    CHECK_FALSE(s.tick().has_value());
    CHECK(code_of([&] { s.handle(Control{ControlAction::Play}); }) == ErrorCode::EventAfterDone);
    CHECK(code_of([&] { s.handle(Zoom{2.0}); }) == ErrorCode::EventAfterDone);
}

TEST_CASE("reset after 500 frames replays a fresh session") {
    Session a(small_config(9));
    for (int i = 0; i < 500; ++i) a.tick();
    a.handle(Brush{View::Tour, Rect{-1, -1, 1, 1}});
    a.handle(Control{ControlAction::Reset});
    Session b(small_config(9));
    CHECK(a.frame_payload() == b.frame_payload());
    for (int i = 0; i < 300; ++i) CHECK(*a.tick() == *b.tick());
}

TEST_CASE("k-NN brushing") {
    Session s(case_study_config());
    const NeighborGraph g = knn(s.config().tour_input, 10);
    s.set_knn_brush(true, g);
    const Matrix& emb = s.embedding();
    const Rect r{emb(0, 0), emb(0, 1), emb(0, 0), emb(0, 1)};
    s.handle(Brush{View::Embedding, r});
    std::set<Index> expected = brute_in_rect(emb, r);
    expected = knn_brush(expected, g);
    CHECK(s.state().selection == expected);
    CHECK(s.state().selection.size() <= 11 * brute_in_rect(emb, r).size());

    s.set_knn_brush(false);
    s.handle(Brush{View::Embedding, r});
    CHECK(s.state().selection == brute_in_rect(emb, r));

    CHECK(code_of([&] { s.set_knn_brush(true, knn(s.config().tour_input.select_rows({0, 1, 2, 3}), 2)); }) ==
          ErrorCode::GraphSizeMismatch);
    CHECK(code_of([&] { s.handle(KnnBrushToggle{true, 500}); }) == ErrorCode::KTooLarge);
}

TEST_CASE("k-NN brush of a separated cluster stays inside the cluster") {
    const LabeledDataset ds = gen_gaussian_clusters(GaussianClusterParams{});
    SessionConfig cfg{ds.data, pca_embed(ds.data, 2)};
    Session s(cfg);
    s.handle(KnnBrushToggle{true, 10});
    std::set<Index> cluster;
    for (Index i = 0; i < ds.n(); ++i) {
        if (ds.labels[static_cast<std::size_t>(i)] == 2) cluster.insert(i);
    }
    const NeighborGraph g = knn(ds.data, 10);
    CHECK(knn_brush(cluster, g) == cluster);
}

TEST_CASE("subsampled sessions share one row selection") {
    const LabeledDataset ds = gen_gaussian_clusters(GaussianClusterParams{});
    Matrix emb = pca_embed(ds.data, 2);
    SessionConfig cfg{ds.data, emb};
    cfg.subsample = SubsampleParams{};
    const auto [sub, rows] = apply_subsample(cfg);
    CHECK(sub.tour_input.n() == 50);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(sub.embedding.row(static_cast<Index>(i)) == emb.row(rows[i]));
    Session s(cfg);
    CHECK(s.n() == 50);
}

TEST_CASE("session config validation") {
    SessionConfig cfg = small_config();
    cfg.embedding = Matrix::Zero(10, 2);
    CHECK(code_of([&] { Session s(cfg); }) == ErrorCode::ConfigInvalid);
    cfg = small_config();
    cfg.d = 6;
    CHECK(code_of([&] { Session s(cfg); }) == ErrorCode::ConfigInvalid);
    cfg = small_config();
    cfg.step_angle = 0.0;
    CHECK(code_of([&] { Session s(cfg); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("scripted session transcript is stable and matches the golden file") {
    const auto a = run_script(small_config(), golden_script(), 16);
    const auto b = run_script(small_config(), golden_script(), 16);
    CHECK(a == b);
    const std::string text = join_lines(a);
    const std::filesystem::path golden = std::filesystem::path(TOURSCOPE_TEST_DIR) / "golden" / "session_transcript.jsonl";
    if (std::getenv("TOURSCOPE_UPDATE_GOLDEN")) {
        std::ofstream(golden, std::ios::binary) << text;
    }
    std::ifstream in(golden, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream expected;
    expected << in.rdbuf();
    CHECK(text == expected.str());

    // Shape of the transcript: meta, frames, refresh frames, one error, done, then EventAfterDone.
    std::vector<std::string> types;
    for (const auto& line : a) types.push_back(json::parse(line)["type"]);
    CHECK(types.front() == "meta");
    CHECK(std::count(types.begin(), types.end(), "done") == 1);
    CHECK(std::count(types.begin(), types.end(), "error") == 2);
    CHECK(types.back() == "error");
}
