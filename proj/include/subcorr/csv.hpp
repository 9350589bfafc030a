#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subcorr::csv {

// Shortest text that round-trips the double exactly; "inf"/"-inf"/"nan" for
// non-finite values.
std::string format_double(double x);

double parse_double(std::string_view field);
long long parse_int(std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

}  // namespace subcorr::csv
