#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tourscope {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    DimensionMismatch,
    RankDeficient,
    NoConvergence,
    DegenerateInput,
    InfeasiblePerplexity,
    DegenerateRow,
    NonFinite,
    EmptyMargin,
    SeparationInfeasible,
    EmptyResult,
    KTooLarge,
    IndexOutOfRange,
    SingleClass,
    ConfigInvalid,
    EventAfterDone,
    GraphSizeMismatch,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can report the module error by name.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace tourscope
