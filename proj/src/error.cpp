#include "tourscope/error.hpp"

namespace tourscope {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::InfeasiblePerplexity: return "InfeasiblePerplexity";
        case ErrorCode::DegenerateRow: return "DegenerateRow";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::EmptyMargin: return "EmptyMargin";
        case ErrorCode::SeparationInfeasible: return "SeparationInfeasible";
        case ErrorCode::EmptyResult: return "EmptyResult";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::EventAfterDone: return "EventAfterDone";
        case ErrorCode::GraphSizeMismatch: return "GraphSizeMismatch";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace tourscope
