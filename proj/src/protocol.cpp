#include "tourscope/protocol.hpp"

#include "tourscope/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tourscope {
namespace {

// Messages are written by hand so every float carries exactly the nine
// significant digits of wire_round, which a generic dumper does not promise.
class Writer {
public:
    Writer& raw(std::string_view s) {
        out_ += s;
        return *this;
    }
    Writer& key(std::string_view k) {
        if (out_.back() != '{') out_ += ',';
        str(k);
        out_ += ':';
        return *this;
    }
    Writer& str(std::string_view s) {
        out_ += nlohmann::json(std::string(s)).dump();
        return *this;
    }
    Writer& num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        out_ += buf;
        if (std::strpbrk(buf, ".eEni") == nullptr) out_ += ".0";
        return *this;
    }
    Writer& integer(long long v) {
        out_ += std::to_string(v);
        return *this;
    }
    Writer& rows(const Matrix& m) {
        out_ += '[';
        for (Index i = 0; i < m.rows(); ++i) {
            if (i) out_ += ',';
            out_ += '[';
            for (Index j = 0; j < m.cols(); ++j) {
                if (j) out_ += ',';
                num(m(i, j));
            }
            out_ += ']';
        }
        out_ += ']';
        return *this;
    }
    Writer& indices(const std::set<Index>* s) {
        out_ += '[';
        if (s) {
            bool first = true;
            for (Index i : *s) {
                if (!first) out_ += ',';
                first = false;
                integer(i);
            }
        }
        out_ += ']';
        return *this;
    }
    template <class Range>
    Writer& strings(const Range* r) {
        out_ += '[';
        if (r) {
            bool first = true;
            for (const auto& v : *r) {
                if (!first) out_ += ',';
                first = false;
                str(v);
            }
        }
        out_ += ']';
        return *this;
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

View parse_view(const nlohmann::json& j) {
    const auto v = j.at("view").get<std::string>();
    if (v == "tour") return View::Tour;
    if (v == "embedding") return View::Embedding;
    throw Error(ErrorCode::ParseError, "unknown view '" + v + "'");
}

std::string label_text(const nlohmann::json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw Error(ErrorCode::ParseError, "legend label must be a string or integer");
}

}  // namespace

std::string_view to_string(View view) noexcept { return view == View::Tour ? "tour" : "embedding"; }

double wire_round(double value) {
    if (!std::isfinite(value)) return value;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return std::strtod(buf, nullptr);
}

Event parse_event(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed message: ") + e.what());
    }
    try {
        const auto type = j.at("type").get<std::string>();
        if (type == "control") {
            const auto action = j.at("action").get<std::string>();
            if (action == "play") return Control{ControlAction::Play};
            if (action == "pause") return Control{ControlAction::Pause};
            if (action == "reset") return Control{ControlAction::Reset};
            if (action == "done") return Control{ControlAction::Done};
            throw Error(ErrorCode::ParseError, "unknown control action '" + action + "'");
        }
        if (type == "brush") {
            const auto& r = j.at("rect");
            if (!r.is_array() || r.size() != 4) throw Error(ErrorCode::ParseError, "rect must be [x0, y0, x1, y1]");
            Rect rect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
            if (!(rect.x0 <= rect.x1) || !(rect.y0 <= rect.y1)) {
                throw Error(ErrorCode::InvalidArgument, "rect corners must satisfy x0 <= x1 and y0 <= y1");
            }
            return Brush{parse_view(j), rect};
        }
        if (type == "brush_clear") return BrushClear{parse_view(j)};
        if (type == "legend") return LegendToggle{label_text(j.at("label"))};
        if (type == "zoom") {
            const double factor = j.at("factor").get<double>();
            if (!(factor > 0.0) || !std::isfinite(factor)) throw Error(ErrorCode::InvalidArgument, "zoom factor must be positive");
            return Zoom{factor};
        }
        if (type == "knn_brush") {
            KnnBrushToggle t;
            t.enabled = j.at("enabled").get<bool>();
            if (j.contains("k")) t.k = j.at("k").get<Index>();
            if (t.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
            return t;
        }
        throw Error(ErrorCode::ParseError, "unknown message type '" + type + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bad field: ") + e.what());
    }
}

std::string serialize_event(const Event& event) {
    Writer w;
    w.raw("{");
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Control>) {
                static constexpr const char* names[] = {"play", "pause", "reset", "done"};
                w.key("type").str("control").key("action").str(names[static_cast<int>(e.action)]);
            } else if constexpr (std::is_same_v<T, Brush>) {
                w.key("type").str("brush").key("view").str(to_string(e.view)).key("rect").raw("[");
                w.num(e.rect.x0).raw(",").num(e.rect.y0).raw(",").num(e.rect.x1).raw(",").num(e.rect.y1).raw("]");
            } else if constexpr (std::is_same_v<T, BrushClear>) {
                w.key("type").str("brush_clear").key("view").str(to_string(e.view));
            } else if constexpr (std::is_same_v<T, LegendToggle>) {
                w.key("type").str("legend").key("label").str(e.label);
            } else if constexpr (std::is_same_v<T, Zoom>) {
                w.key("type").str("zoom").key("factor").num(e.factor);
            } else {
                w.key("type").str("knn_brush").key("enabled").raw(e.enabled ? "true" : "false").key("k").integer(e.k);
            }
        },
        event);
    return w.raw("}").take();
}

std::string meta_message(const MetaFields& meta) {
    Writer w;
    w.raw("{").key("type").str("meta").key("n").integer(meta.n).key("d").integer(meta.d);
    w.key("labels").strings(&meta.labels).key("label_names").strings(&meta.label_names);
    w.key("embedding");
    if (meta.embedding) {
        w.rows(*meta.embedding);
    } else {
        w.raw("[]");
    }
    return w.key("half_range").num(meta.half_range).raw("}").take();
}

std::string frame_message(const FrameFields& frame) {
    Writer w;
    w.raw("{").key("type").str("frame").key("frame").integer(static_cast<long long>(frame.frame));
    w.key("basis");
    if (frame.basis) {
        w.rows(frame.basis->transpose());
    } else {
        w.raw("[]");
    }
    w.key("points");
    if (frame.points) {
        w.rows(*frame.points);
    } else {
        w.raw("[]");
    }
    w.key("selection").indices(frame.selection).key("highlight").strings(frame.highlight);
    return w.raw("}").take();
}

std::string done_message(const DoneFields& done) {
    Writer w;
    w.raw("{").key("type").str("done").key("basis");
    if (done.basis) {
        w.rows(done.basis->transpose());
    } else {
        w.raw("[]");
    }
    w.key("selection").indices(done.selection).key("highlight").strings(done.highlight);
    return w.raw("}").take();
}

std::string error_message(std::string_view code, std::string_view message) {
    Writer w;
    w.raw("{").key("type").str("error").key("code").str(code).key("message").str(message);
    return w.raw("}").take();
}

}  // namespace tourscope
