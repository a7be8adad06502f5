#pragma once

#include "tourscope/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tourscope {

struct CsvOptions {
    bool header = true;
    /// Label column by header name or zero-based index. When unset and the
    /// header has a column literally named "label", that column is used.
    std::optional<std::variant<std::string, std::size_t>> label_column;
    char delimiter = ',';
};

/// Parses numeric observations, one per line. Any non-numeric data cell is a
/// ParseError naming its (1-based) line and column.
DataMatrix read_csv(std::istream& in, const CsvOptions& options = {});
DataMatrix read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes `values` with the given header names and an optional trailing
/// label column. Numbers use 17 significant digits so output round-trips.
void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& names,
               const std::optional<std::vector<std::string>>& labels = std::nullopt,
               const std::string& label_name = "label");
void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& names,
               const std::optional<std::vector<std::string>>& labels = std::nullopt,
               const std::string& label_name = "label");

/// "dim1", "dim2", ...
std::vector<std::string> dim_names(Index d, const std::string& prefix = "dim");

std::string format_double(double value, int significant_digits = 17);

}  // namespace tourscope
