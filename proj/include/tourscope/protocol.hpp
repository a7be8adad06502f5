#pragma once

#include "tourscope/types.hpp"

#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tourscope {

enum class View { Tour, Embedding };
enum class ControlAction { Play, Pause, Reset, Done };

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

struct Control {
    ControlAction action = ControlAction::Play;
};
struct Brush {
    View view = View::Tour;
    Rect rect;
};
struct BrushClear {
    View view = View::Tour;
};
struct LegendToggle {
    std::string label;
};
struct Zoom {
    double factor = 1.0;
};
struct KnnBrushToggle {
    bool enabled = false;
    Index k = 10;
};

using Event = std::variant<Control, Brush, BrushClear, LegendToggle, Zoom, KnnBrushToggle>;

/// Parses one client message. Throws ParseError for malformed JSON or an
/// unknown type, InvalidArgument for a rect with x0 > x1 or y0 > y1, a
/// non-positive zoom factor, or k < 1.
Event parse_event(std::string_view text);

/// Client-side encoding of an event, in the same wire format.
std::string serialize_event(const Event& event);

std::string_view to_string(View view) noexcept;

/// Rounds to nine significant digits, the precision of every float on the wire.
double wire_round(double value);

struct MetaFields {
    Index n = 0;
    Index d = 2;
    std::vector<std::string> labels;
    std::vector<std::string> label_names;
    const Matrix* embedding = nullptr;
    double half_range = 1.0;
};

struct FrameFields {
    std::uint64_t frame = 0;
    const Matrix* basis = nullptr;    ///< p x d; sent as d rows of p values
    const Matrix* points = nullptr;   ///< n x d, already divided by the half range
    const std::set<Index>* selection = nullptr;
    const std::set<std::string>* highlight = nullptr;
};

struct DoneFields {
    const Matrix* basis = nullptr;
    const std::set<Index>* selection = nullptr;
    const std::set<std::string>* highlight = nullptr;
};

std::string meta_message(const MetaFields& meta);
std::string frame_message(const FrameFields& frame);
std::string done_message(const DoneFields& done);
std::string error_message(std::string_view code, std::string_view message);

}  // namespace tourscope
