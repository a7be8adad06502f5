// tourscope command line: simulate, embed, tour, serve, metrics, replay.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include "tourscope/ca.hpp"
#include "tourscope/csv.hpp"
#include "tourscope/diagnostics.hpp"
#include "tourscope/embed.hpp"
#include "tourscope/error.hpp"
#include "tourscope/linalg.hpp"
#include "tourscope/server.hpp"
#include "tourscope/simulate.hpp"
#include "tourscope/tour.hpp"
#include "tourscope/tsne.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace tourscope;
using json = nlohmann::json;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulateArgs {
    std::string kind;
    std::string out;
    std::uint64_t seed = 1;
    // gaussian
    int k = 5;
    Index signal_dim = 5;
    Index ambient_dim = 10;
    Index n_per_cluster = 100;
    double spread = 1.0;
    double separation = 10.0;
    // hierarchical
    Index n_large = 200;
    Index n_sub_large = 100;
    Index n_small = 50;
    double large_sd = 1.0;
    double outer_separation = 15.0;
    double sub_separation = 6.0;
    double small_sd = 0.3;
    double small_spacing = 2.0;
    // tree
    Index n = 3000;
    Index p = 100;
    int branches = 10;
    double noise_sd = DlaTreeParams{}.noise_sd;
    double step = 1.0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimulateArgs, kind, out, seed, k, signal_dim, ambient_dim,
                                                n_per_cluster, spread, separation, n_large, n_sub_large, n_small,
                                                large_sd, outer_separation, sub_separation, small_sd, small_spacing,
                                                n, p, branches, noise_sd, step)

struct EmbedArgs {
    std::string method;
    std::string input;
    std::string out;
    std::string label_column;
    Index dims = 2;
    // tsne
    double perplexity = 30.0;
    std::string init = "random";
    double init_sd = 1e-4;
    int n_iter = 1000;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    int exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iter = 250;
    Index initial_dims = 50;
    std::uint64_t seed = 42;
    // ca
    double alpha = 0.5;
    std::string side = "rows";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EmbedArgs, method, input, out, label_column, dims, perplexity, init,
                                                init_sd, n_iter, learning_rate, exaggeration, exaggeration_iters,
                                                initial_momentum, final_momentum, momentum_switch_iter, initial_dims,
                                                seed, alpha, side)

struct TourArgs {
    std::string input;
    std::string out_dir;
    std::string label_column;
    Index pcs = 0;
    Index frames = 100;
    Index d = 2;
    double step_angle = 0.05;
    std::uint64_t seed = 0;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TourArgs, input, out_dir, label_column, pcs, frames, d, step_angle,
                                                seed)

struct ServeArgs {
    std::string input;
    std::string embedding;
    std::string label_column;
    std::string address = "127.0.0.1";
    unsigned short port = 9147;
    double subsample = 0.0;
    std::uint64_t subsample_seed = 1;
    double damping = 0.5;
    Index pcs = 5;
    Index d = 2;
    double step_angle = 0.05;
    double fps = 30.0;
    std::uint64_t seed = 0;
    std::string static_dir;
    std::string out;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ServeArgs, input, embedding, label_column, address, port, subsample,
                                                subsample_seed, damping, pcs, d, step_angle, fps, seed, static_dir,
                                                out)

struct MetricsArgs {
    std::string x;
    std::string y;
    std::string label_column;
    Index k = 10;
    std::string out;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MetricsArgs, x, y, label_column, k, out)

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

json manifest(const std::string& command, const json& args) {
    return json{{"command", command}, {"args", args}};
}

DataMatrix load(const std::string& path, const std::string& label_column) {
    CsvOptions opts;
    if (!label_column.empty()) opts.label_column = label_column;
    return read_csv(fs::path(path), opts);
}

// PCA scores when 0 < pcs < p, the input itself otherwise; labels kept.
DataMatrix reduce(const DataMatrix& x, Index pcs) {
    if (pcs <= 0 || pcs >= x.p()) return x;
    if (pcs > x.n() - 1) throw UsageError("--pcs " + std::to_string(pcs) + " exceeds n - 1");
    return DataMatrix(pca(x, pcs).scores, x.labels(), dim_names(pcs, "PC"));
}

json summary(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return json{{"mean", mean}, {"min", *lo}, {"max", *hi}};
}

int run_simulate(const SimulateArgs& a) {
    LabeledDataset ds = [&] {
        if (a.kind == "gaussian") {
            GaussianClusterParams p;
            p.k = a.k;
            p.signal_dim = a.signal_dim;
            p.ambient_dim = a.ambient_dim;
            p.n_per_cluster = a.n_per_cluster;
            p.spread = a.spread;
            p.separation = a.separation;
            p.seed = a.seed;
            return gen_gaussian_clusters(p);
        }
        if (a.kind == "hierarchical") {
            HierarchicalParams p;
            p.ambient_dim = a.ambient_dim;
            p.n_large = a.n_large;
            p.n_sub_large = a.n_sub_large;
            p.n_small = a.n_small;
            p.large_sd = a.large_sd;
            p.outer_separation = a.outer_separation;
            p.sub_separation = a.sub_separation;
            p.small_sd = a.small_sd;
            p.small_spacing = a.small_spacing;
            p.seed = a.seed;
            return gen_hierarchical_clusters(p);
        }
        DlaTreeParams p;
        p.n = a.n;
        p.p = a.p;
        p.branches = a.branches;
        p.noise_sd = a.noise_sd;
        p.step = a.step;
        p.seed = a.seed;
        return gen_dla_tree(p);
    }();
    write_csv(fs::path(a.out), ds.data.values(), ds.data.col_names(), ds.data.labels());
    json sidecar = manifest("simulate", a);
    sidecar["result"] = {{"n", ds.n()}, {"p", ds.data.p()}};
    if (ds.fine_labels) {
        const fs::path fine = fs::path(a.out).replace_extension(".fine_labels.csv");
        std::ofstream f(fine);
        f << "fine_label\n";
        for (int l : *ds.fine_labels) f << l << "\n";
        sidecar["result"]["fine_labels"] = fine.string();
    }
    write_json(a.out + ".json", sidecar);
    std::cout << "wrote " << a.out << " (" << ds.n() << " x " << ds.data.p() << ")\n";
    return 0;
}

int run_embed(const EmbedArgs& a) {
    const DataMatrix x = load(a.input, a.label_column);
    json result;
    Matrix layout;
    std::optional<std::vector<std::string>> labels = x.labels();
    if (a.method == "pca") {
        layout = pca_embed(x, a.dims);
    } else if (a.method == "tsne") {
        TsneConfig cfg;
        cfg.perplexity = a.perplexity;
        cfg.output_dim = a.dims;
        cfg.n_iter = a.n_iter;
        cfg.learning_rate = a.learning_rate;
        cfg.early_exaggeration = a.exaggeration;
        cfg.exaggeration_iters = a.exaggeration_iters;
        cfg.initial_momentum = a.initial_momentum;
        cfg.final_momentum = a.final_momentum;
        cfg.momentum_switch_iter = a.momentum_switch_iter;
        cfg.initial_dims = a.initial_dims;
        cfg.seed = a.seed;
        if (a.init == "pca") {
            cfg.init = PcaInit{a.init_sd};
        } else {
            cfg.init = RandomInit{a.init_sd};
        }
        const TsneModel m = run_tsne(x, cfg);
        layout = m.y;
        result["loss_iterations"] = m.loss_iterations;
        result["loss_trace"] = m.loss_trace;
        result["final_loss"] = m.loss_trace.empty() ? 0.0 : m.loss_trace.back();
    } else {
        const CaResult ca = correspondence_analysis(x.values(), a.alpha);
        const Matrix& scores = a.side == "rows" ? ca.row_scores : ca.col_scores;
        layout = scores.leftCols(std::min<Index>(a.dims, scores.cols()));
        if (a.side == "cols") labels = x.col_names();
        result["singular_values"] = std::vector<double>(ca.sing_val.data(), ca.sing_val.data() + ca.sing_val.size());
        result["total_inertia"] = ca.total;
    }
    write_csv(fs::path(a.out), layout, dim_names(layout.cols()), labels);
    json m = manifest("embed", a);
    m["result"] = result;
    write_json(a.out + ".manifest.json", m);
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

int run_tour(const TourArgs& a) {
    const DataMatrix x = reduce(load(a.input, a.label_column), a.pcs);
    if (a.d < 1 || a.d > x.p()) throw UsageError("--d must lie in [1, " + std::to_string(x.p()) + "]");
    const HalfRange hr = compute_half_range(x);
    const Matrix display = hr.rescaled.array() - 0.5;

    TourConfig cfg;
    cfg.p = x.p();
    cfg.d = a.d;
    cfg.seed = a.seed;
    cfg.step_angle = a.step_angle;
    TourPathState state = make_tour(cfg);
    fs::create_directories(a.out_dir);

    // Frame 0 is the initial basis; --frames 0 still writes it.
    const Index count = std::max<Index>(a.frames, 1);
    double worst = 0.0;
    for (Index f = 0; f < count; ++f) {
        if (f > 0) state = next_frame(state).first;
        const ProjectionBasis& b = current_basis(state);
        worst = std::max(worst, b.orthonormality_error());
        char name[32];
        std::snprintf(name, sizeof name, "%05lld", static_cast<long long>(f));
        write_csv(fs::path(a.out_dir) / ("frame_" + std::string(name) + ".csv"), project(display, b) / hr.half_range,
                  dim_names(a.d, "proj"), x.labels());
        write_csv(fs::path(a.out_dir) / ("basis_" + std::string(name) + ".csv"), b.matrix(), dim_names(a.d, "proj"),
                  x.col_names(), "variable");
    }
    json m = manifest("tour", a);
    m["result"] = {{"frames_written", count}, {"half_range", hr.half_range}, {"max_orthonormality_error", worst}};
    write_json(fs::path(a.out_dir) / "manifest.json", m);
    std::cout << "wrote " << count << " frames to " << a.out_dir << "\n";
    return 0;
}

int run_serve(const ServeArgs& a) {
    const DataMatrix raw = load(a.input, a.label_column);
    Matrix embedding;
    if (a.embedding.empty()) {
        embedding = pca_embed(raw, 2);
    } else {
        embedding = load(a.embedding, "").values();
        if (embedding.rows() != raw.n()) {
            throw UsageError("--embedding has " + std::to_string(embedding.rows()) + " rows, input has " +
                             std::to_string(raw.n()));
        }
        if (embedding.cols() > 2) embedding = embedding.leftCols(2).eval();
    }
    SessionConfig cfg{reduce(raw, a.pcs), embedding, a.d, a.step_angle, a.fps, std::nullopt, a.seed};
    cfg.d = a.d;
    cfg.step_angle = a.step_angle;
    cfg.frames_per_second = a.fps;
    cfg.seed = a.seed;
    if (a.subsample > 0.0 && a.subsample < 1.0) {
        SubsampleParams sp;
        sp.fraction = a.subsample;
        sp.damping = a.damping;
        sp.seed = a.subsample_seed;
        cfg.subsample = sp;
    }
    std::vector<Index> rows;
    std::tie(cfg, rows) = apply_subsample(cfg);

    ServerOptions opts;
    opts.address = a.address;
    opts.port = a.port;
    if (!a.static_dir.empty()) opts.static_dir = fs::path(a.static_dir);
    SessionServer server(cfg, opts);
    std::cout << "serving " << cfg.tour_input.n() << " of " << raw.n() << " rows at ws://" << a.address << ":"
              << server.port() << "/";
    if (opts.static_dir) std::cout << " (UI at http://" << a.address << ":" << server.port() << "/)";
    std::cout << std::endl;
    server.run();

    const auto payload = server.final_payload();
    if (!a.out.empty() && payload) {
        json out = manifest("serve", a);
        std::vector<std::vector<double>> basis;
        for (Index j = 0; j < payload->basis.d(); ++j) {
            const Vector c = payload->basis.matrix().col(j);
            basis.emplace_back(c.data(), c.data() + c.size());
        }
        std::vector<Index> selection;
        for (Index i : payload->selection) selection.push_back(rows[static_cast<std::size_t>(i)]);
        out["result"] = {{"basis", basis},
                         {"variables", cfg.tour_input.col_names()},
                         {"selection", selection},
                         {"highlight", payload->highlight}};
        write_json(a.out, out);
        std::cout << "wrote " << a.out << "\n";
    }
    return 0;
}

int run_metrics(const MetricsArgs& a) {
    const DataMatrix x = load(a.x, a.label_column);
    const DataMatrix y = load(a.y, a.label_column);
    if (x.n() != y.n()) {
        throw UsageError("row counts differ: " + a.x + " has " + std::to_string(x.n()) + ", " + a.y + " has " +
                         std::to_string(y.n()));
    }
    if (a.k < 1 || a.k >= x.n()) throw UsageError("--k must lie in [1, n - 1]");
    const PreservationReport r = neighborhood_preservation(x.values(), y.values(), a.k);
    json report{{"n", x.n()},
                {"k", a.k},
                {"mean_overlap", r.mean_overlap},
                {"distortion", summary(r.distortion_score)},
                {"diffusion", summary(r.diffusion_score)},
                {"rank_displacement", summary(rank_preservation(x.values(), y.values(), a.k))}};
    const auto& labels = x.labels() ? x.labels() : y.labels();
    if (labels) {
        std::set<std::string> classes(labels->begin(), labels->end());
        if (classes.size() >= 2) {
            const ClusterGeometry g = cluster_geometry(x.values(), y.values(), *labels);
            json pairs = json::array();
            for (const auto& p : g.pairs) pairs.push_back({{"a", p.a}, {"b", p.b}, {"dist_x", p.dist_x}, {"dist_y", p.dist_y}});
            report["cluster_geometry"] = {{"classes", g.classes},
                                          {"pairs", pairs},
                                          {"rank_correlation", g.rank_correlation},
                                          {"degenerate", g.degenerate}};
        }
    }
    if (a.out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        write_json(a.out, report);
    }
    return 0;
}

int replay(const std::string& path, const std::string& out_override) {
    const json m = read_json(path);
    if (!m.contains("command") || !m.contains("args")) throw UsageError(path + " is not a run manifest");
    const std::string cmd = m["command"];
    json args = m["args"];
    if (!out_override.empty()) args[cmd == "tour" ? "out_dir" : "out"] = out_override;
    if (cmd == "simulate") return run_simulate(args.get<SimulateArgs>());
    if (cmd == "embed") return run_embed(args.get<EmbedArgs>());
    if (cmd == "tour") return run_tour(args.get<TourArgs>());
    if (cmd == "serve") return run_serve(args.get<ServeArgs>());
    throw UsageError("cannot replay command '" + cmd + "'");
}

bool is_usage(ErrorCode c) {
    return c == ErrorCode::InvalidArgument || c == ErrorCode::ConfigInvalid || c == ErrorCode::KTooLarge ||
           c == ErrorCode::DimensionMismatch || c == ErrorCode::InfeasiblePerplexity;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tourscope: tours, embeddings and diagnostics for high-dimensional data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tourscope 0.1.0");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a benchmark dataset as CSV plus a JSON sidecar");
    simulate->add_option("kind", sim.kind, "gaussian | hierarchical | tree")
        ->required()
        ->check(CLI::IsMember({"gaussian", "hierarchical", "tree"}));
    simulate->add_option("--out", sim.out, "output CSV")->required();
    simulate->add_option("--seed", sim.seed)->capture_default_str();
    simulate->add_option("--k", sim.k, "gaussian: clusters")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--signal-dim", sim.signal_dim)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--ambient-dim", sim.ambient_dim)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--n-per-cluster", sim.n_per_cluster)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--spread", sim.spread)->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_option("--separation", sim.separation)->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_option("--n-large", sim.n_large)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--n-sub-large", sim.n_sub_large)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--n-small", sim.n_small)->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--large-sd", sim.large_sd)->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_option("--outer-separation", sim.outer_separation)->capture_default_str();
    simulate->add_option("--sub-separation", sim.sub_separation)->capture_default_str();
    simulate->add_option("--small-sd", sim.small_sd)->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_option("--small-spacing", sim.small_spacing)->capture_default_str();
    simulate->add_option("--n", sim.n, "tree: rows")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--p", sim.p, "tree: columns")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--branches", sim.branches)->capture_default_str()->check(CLI::Range(2, 1000000));
    simulate->add_option("--noise-sd", sim.noise_sd)->capture_default_str()->check(CLI::NonNegativeNumber);
    simulate->add_option("--step", sim.step)->capture_default_str()->check(CLI::PositiveNumber);

    EmbedArgs emb;
    auto* embed = app.add_subcommand("embed", "Compute a 2-d layout (t-SNE, PCA or correspondence analysis)");
    embed->add_option("method", emb.method)->required()->check(CLI::IsMember({"tsne", "pca", "ca"}));
    embed->add_option("input", emb.input)->required()->check(CLI::ExistingFile);
    embed->add_option("--out", emb.out, "layout CSV; the manifest goes to <out>.manifest.json")->required();
    embed->add_option("--label-column", emb.label_column);
    embed->add_option("--dims", emb.dims)->capture_default_str()->check(CLI::PositiveNumber);
    embed->add_option("--perplexity", emb.perplexity)->capture_default_str()->check(CLI::PositiveNumber);
    embed->add_option("--init", emb.init)->capture_default_str()->check(CLI::IsMember({"random", "pca"}));
    embed->add_option("--init-sd", emb.init_sd)->capture_default_str()->check(CLI::PositiveNumber);
    embed->add_option("--n-iter", emb.n_iter)->capture_default_str()->check(CLI::NonNegativeNumber);
    embed->add_option("--learning-rate", emb.learning_rate)->capture_default_str()->check(CLI::PositiveNumber);
    embed->add_option("--exaggeration", emb.exaggeration)->capture_default_str()->check(CLI::PositiveNumber);
    embed->add_option("--exaggeration-iters", emb.exaggeration_iters)->capture_default_str()->check(CLI::NonNegativeNumber);
    embed->add_option("--initial-momentum", emb.initial_momentum)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    embed->add_option("--final-momentum", emb.final_momentum)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    embed->add_option("--momentum-switch-iter", emb.momentum_switch_iter)->capture_default_str()->check(CLI::NonNegativeNumber);
    embed->add_option("--initial-dims", emb.initial_dims, "PCA pre-reduction, 0 disables")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    embed->add_option("--seed", emb.seed)->capture_default_str();
    embed->add_option("--alpha", emb.alpha)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    embed->add_option("--side", emb.side, "ca: rows | cols")->capture_default_str()->check(CLI::IsMember({"rows", "cols"}));

    TourArgs tr;
    auto* tour = app.add_subcommand("tour", "Write headless grand tour frames and bases");
    tour->add_option("input", tr.input)->required()->check(CLI::ExistingFile);
    tour->add_option("--out-dir", tr.out_dir)->required();
    tour->add_option("--label-column", tr.label_column);
    tour->add_option("--pcs", tr.pcs, "tour the first k principal components, 0 keeps all columns")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    tour->add_option("--frames", tr.frames)->capture_default_str()->check(CLI::NonNegativeNumber);
    tour->add_option("--d", tr.d)->capture_default_str()->check(CLI::PositiveNumber);
    tour->add_option("--step-angle", tr.step_angle)->capture_default_str()->check(CLI::PositiveNumber);
    tour->add_option("--seed", tr.seed)->capture_default_str();

    ServeArgs sv;
    auto* serve = app.add_subcommand("serve", "Run the interactive session server");
    serve->add_option("input", sv.input)->required()->check(CLI::ExistingFile);
    serve->add_option("--embedding", sv.embedding, "layout CSV; defaults to the first two PCs")->check(CLI::ExistingFile);
    serve->add_option("--label-column", sv.label_column);
    serve->add_option("--address", sv.address)->capture_default_str();
    serve->add_option("--port", sv.port)->capture_default_str();
    serve->add_option("--subsample", sv.subsample, "weighted sample fraction, 0 disables")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    serve->add_option("--subsample-seed", sv.subsample_seed)->capture_default_str();
    serve->add_option("--damping", sv.damping)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    serve->add_option("--pcs", sv.pcs)->capture_default_str()->check(CLI::NonNegativeNumber);
    serve->add_option("--d", sv.d)->capture_default_str()->check(CLI::PositiveNumber);
    serve->add_option("--step-angle", sv.step_angle)->capture_default_str()->check(CLI::PositiveNumber);
    serve->add_option("--fps", sv.fps)->capture_default_str()->check(CLI::PositiveNumber);
    serve->add_option("--seed", sv.seed)->capture_default_str();
    serve->add_option("--static-dir", sv.static_dir, "directory of browser assets")->check(CLI::ExistingDirectory);
    serve->add_option("--out", sv.out, "JSON file for the final basis and selection");

    MetricsArgs mt;
    auto* metrics = app.add_subcommand("metrics", "Neighbourhood preservation report for a layout");
    metrics->add_option("x", mt.x, "original data CSV")->required()->check(CLI::ExistingFile);
    metrics->add_option("y", mt.y, "layout CSV")->required()->check(CLI::ExistingFile);
    metrics->add_option("--label-column", mt.label_column);
    metrics->add_option("--k", mt.k)->capture_default_str()->check(CLI::PositiveNumber);
    metrics->add_option("--out", mt.out);

    std::string manifest_path, out_override;
    auto* rep = app.add_subcommand("replay", "Re-run a simulate, embed, tour or serve manifest");
    rep->add_option("manifest", manifest_path)->required()->check(CLI::ExistingFile);
    rep->add_option("--out", out_override, "write to this path (or directory, for tour) instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*embed) return run_embed(emb);
        if (*tour) return run_tour(tr);
        if (*serve) return run_serve(sv);
        if (*metrics) return run_metrics(mt);
        return replay(manifest_path, out_override);
    } catch (const UsageError& e) {
        std::cerr << "tourscope: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        std::cerr << "tourscope: error " << to_string(e.code()) << ": " << e.detail() << "\n";
        return is_usage(e.code()) ? kUsageError : kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "tourscope: " << e.what() << "\n";
        return kRuntimeError;
    }
}
