#include "flame/csv.hpp"

#include <charconv>
#include <cmath>

#include "flame/error.hpp"

namespace flame::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                row_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_started || !field.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                field.clear();
                row.clear();
                row_started = false;
                break;
            default:
                field.push_back(c);
                row_started = true;
        }
    }
    if (in_quotes) fail(ErrorCode::BadConfig, "unterminated quoted CSV field");
    if (row_started || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string escape(std::string_view f) {
    if (f.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(f);
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const Row& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(row[i]);
    }
    out.push_back('\n');
    return out;
}

std::vector<Row> parse_with_header(std::string_view text, const Row& header, std::string_view what) {
    auto rows = parse(text);
    if (rows.empty() || rows.front() != header) {
        fail(ErrorCode::BadConfig, std::string(what) + ": unexpected or missing CSV header");
    }
    rows.erase(rows.begin());
    for (const auto& r : rows) {
        if (r.size() != header.size()) {
            fail(ErrorCode::BadConfig, std::string(what) + ": row has wrong column count");
        }
    }
    return rows;
}

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

double parse_number(std::string_view s, std::string_view what) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        fail(ErrorCode::BadConfig, std::string(what) + ": not a number: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace flame::csv
