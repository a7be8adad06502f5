#include "tourscope/csv.hpp"

#include "tourscope/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tourscope {
namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == delimiter && !quoted) {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    cells.push_back(std::move(cell));
    for (auto& c : cells) {
        const auto first = c.find_first_not_of(" \t");
        const auto last = c.find_last_not_of(" \t");
        c = first == std::string::npos ? std::string() : c.substr(first, last - first + 1);
    }
    return cells;
}

bool parse_number(const std::string& text, double& value) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

}  // namespace

DataMatrix read_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    std::vector<std::string> header;
    std::size_t line_no = 0;
    if (options.header) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) break;
        }
        header = split_line(line, options.delimiter);
    }

    std::optional<std::size_t> label_col;
    if (options.label_column) {
        if (const auto* idx = std::get_if<std::size_t>(&*options.label_column)) {
            label_col = *idx;
        } else {
            const auto& name = std::get<std::string>(*options.label_column);
            if (!options.header) {
                throw Error(ErrorCode::InvalidArgument, "label column '" + name + "' selected by name without a header");
            }
            for (std::size_t j = 0; j < header.size(); ++j) {
                if (header[j] == name) label_col = j;
            }
            if (!label_col) throw Error(ErrorCode::InvalidArgument, "no column named '" + name + "'");
        }
    } else if (options.header) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == "label") label_col = j;
        }
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_line(line, options.delimiter);
        if (rows.empty() && width == 0) {
            width = cells.size();
            if (label_col && *label_col >= width) {
                throw Error(ErrorCode::InvalidArgument, "label column index out of range");
            }
        } else if (cells.size() != width) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(width) + " fields, found " +
                                                   std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(width);
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (label_col && j == *label_col) {
                labels.push_back(cells[j]);
                continue;
            }
            double value = 0.0;
            if (!parse_number(cells[j], value)) {
                const std::string col = j < header.size() ? " ('" + header[j] + "')" : std::string();
                throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ", column " +
                                                       std::to_string(j + 1) + col + ": '" + cells[j] +
                                                       "' is not a number");
            }
            row.push_back(value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::ParseError, "no data rows");
    const std::size_t p = rows.front().size();
    if (p == 0) throw Error(ErrorCode::ParseError, "no numeric columns");

    Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(p));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < p; ++j) values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    std::vector<std::string> names;
    if (options.header) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (!label_col || j != *label_col) names.push_back(header[j]);
        }
        if (names.size() != p) names.clear();
    }
    std::optional<std::vector<std::string>> label_opt;
    if (label_col) label_opt = std::move(labels);
    return DataMatrix(std::move(values), std::move(label_opt), std::move(names));
}

DataMatrix read_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_csv(in, options);
}

std::string format_double(double value, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, value);
    return buf;
}

std::vector<std::string> dim_names(Index d, const std::string& prefix) {
    std::vector<std::string> names;
    for (Index j = 0; j < d; ++j) names.push_back(prefix + std::to_string(j + 1));
    return names;
}

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& names,
               const std::optional<std::vector<std::string>>& labels, const std::string& label_name) {
    if (static_cast<Index>(names.size()) != values.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "header size does not match column count");
    }
    if (labels && static_cast<Index>(labels->size()) != values.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "label count does not match row count");
    }
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    if (labels) out << (names.empty() ? "" : ",") << label_name;
    out << '\n';
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
        if (labels) out << (values.cols() ? "," : "") << (*labels)[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& names,
               const std::optional<std::vector<std::string>>& labels, const std::string& label_name) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_csv(out, values, names, labels, label_name);
}

}  // namespace tourscope
