#pragma once

// Minimal RFC-4180 reader/writer. Fields are returned as raw strings; callers
// do their own typing.

#include "tssim/error.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace tssim::csv {

using Row = std::vector<std::string>;

struct Table {
    Row header;
    std::vector<Row> rows;
    // 1-based physical line number of each data row (for error messages).
    std::vector<std::size_t> line_numbers;

    /// Index of a header column, or npos.
    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        return npos;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

inline std::vector<Row> parse_rows(std::string_view text, std::vector<std::size_t>* line_numbers = nullptr) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t row_start_line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        // Blank lines are skipped.
        if (!(row.size() == 1 && row[0].empty() && !row_has_content)) {
            rows.push_back(std::move(row));
            if (line_numbers != nullptr) {
                line_numbers->push_back(row_start_line);
            }
        }
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') {
                    ++line;
                }
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (!field.empty() || field_was_quoted) {
                throw ParseError("csv: unexpected quote on line " + std::to_string(line));
            }
            in_quotes = true;
            field_was_quoted = true;
            row_has_content = true;
            break;
        case ',':
            end_field();
            row_has_content = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                break;
            }
            [[fallthrough]];
        case '\n':
            end_row();
            ++line;
            row_start_line = line;
            break;
        default:
            if (field_was_quoted) {
                throw ParseError("csv: text after closing quote on line " + std::to_string(line));
            }
            field.push_back(ch);
            row_has_content = true;
        }
    }
    if (in_quotes) {
        throw ParseError("csv: unterminated quoted field starting on line " + std::to_string(row_start_line));
    }
    if (row_has_content || !field.empty() || !row.empty()) {
        end_row();
    }
    return rows;
}

/// Parses text whose first row is a header. Every data row must have the
/// header's width.
inline Table parse(std::string_view text) {
    Table table;
    std::vector<std::size_t> lines;
    auto rows = parse_rows(text, &lines);
    if (rows.empty()) {
        throw ParseError("csv: missing header row");
    }
    table.header = std::move(rows.front());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != table.header.size()) {
            throw ParseError("csv: line " + std::to_string(lines[r]) + " has " + std::to_string(rows[r].size()) +
                             " fields, expected " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(rows[r]));
        table.line_numbers.push_back(lines[r]);
    }
    return table;
}

inline std::string quote(std::string_view field) {
    const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

inline void append_row(std::string& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        out += quote(row[i]);
    }
    out.push_back('\n');
}

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw Error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

/// Strict full-field parse; rejects trailing garbage and empty input.
inline bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

inline bool parse_int(std::string_view text, long long& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace tssim::csv
