#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace climd {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

double parse_double(std::string_view text);
std::size_t parse_size(std::string_view text);

/// Splits on `sep` without any quoting rules.
std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);

}  // namespace climd
