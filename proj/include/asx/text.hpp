#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace asx {

/// Strict decimal parse of the whole string; throws std::invalid_argument
/// naming `what` on failure.
double parse_number(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

/// Comma-separated lists, e.g. "0.6931,0".
std::vector<double> parse_number_list(std::string_view text, std::string_view what);
std::vector<long long> parse_integer_list(std::string_view text, std::string_view what);

/// Shortest representation that parses back to the same double.
std::string format_shortest(double value);

/// printf "%.12g".
std::string format_sig12(double value);

}  // namespace asx
