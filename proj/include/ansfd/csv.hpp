#pragma once

// Locale-independent number formatting and parsing shared by the CSV/JSON
// writers and the text grammars.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ansfd {

/// 17 significant digits, `%.17g` layout, always '.' as decimal point.
std::string format_number(double v);

/// Shortest text that parses back to the same double.
std::string format_shortest(double v);

/// Whole-string parse; throws ParseError naming `what` on failure.
double parse_number(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);
std::uint64_t parse_unsigned(std::string_view text, std::string_view what);

std::vector<std::string_view> split(std::string_view text, char sep);

/// Writes one CSV record terminated by '\n'; fields containing ',' or '"' are quoted.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace ansfd
