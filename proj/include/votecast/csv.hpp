#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "votecast/errors.hpp"
#include "votecast/text.hpp"

namespace votecast::csv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line_no = 0;
};

/// Splits delimiter-separated rows, trimming surrounding whitespace per
/// field. Blank lines and '#' comment lines are skipped. No quoting rules:
/// none of the pipeline formats embed delimiters in values.
inline std::vector<Row> read_rows(std::istream& in, char delim = ',') {
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        Row row;
        row.line_no = line_no;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(delim, start);
            if (pos == std::string::npos) {
                row.fields.push_back(text::trim(std::string_view(line).substr(start)));
                break;
            }
            row.fields.push_back(text::trim(std::string_view(line).substr(start, pos - start)));
            start = pos + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<Row> read_file(const std::filesystem::path& path, char delim = ',') {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    return read_rows(in, delim);
}

inline double parse_number(const std::string& field, const std::string& context) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw DataError(context + ": not a number: '" + field + "'");
    }
    return v;
}

/// Parses a percent column ("97", "53.48", optional trailing '%') into a
/// fraction in [0, 1].
inline double parse_percent(std::string field, const std::string& context) {
    if (!field.empty() && field.back() == '%') {
        field.pop_back();
        field = text::trim(field);
    }
    const double v = parse_number(field, context);
    if (v < 0.0 || v > 100.0) {
        throw DataError(context + ": percentage out of range: '" + field + "'");
    }
    return v / 100.0;
}

} // namespace votecast::csv
