#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flame::csv {

using Row = std::vector<std::string>;

/// RFC 4180 subset: comma separated, double-quote escaping, LF or CRLF rows.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const Row& row);

/// Parses a document whose first row is `expected_header`; throws BadConfig if
/// the header differs. Returns data rows only.
std::vector<Row> parse_with_header(std::string_view text, const Row& expected_header,
                                   std::string_view what);

/// Shortest decimal that round-trips the double.
std::string format_number(double v);
double parse_number(std::string_view s, std::string_view what);

}  // namespace flame::csv
