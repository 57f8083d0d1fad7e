#include "asx/text.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace asx {

namespace {

template <typename T>
T parse_whole(std::string_view text, std::string_view what) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last) {
        throw std::invalid_argument(std::string(what) + ": cannot parse '" + std::string(text) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
    std::vector<T> out;
    std::size_t start = 0;
    while (true) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_whole<T>(piece, what));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
    return parse_whole<double>(text, what);
}

long long parse_integer(std::string_view text, std::string_view what) {
    return parse_whole<long long>(text, what);
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
    return parse_list<double>(text, what);
}

std::vector<long long> parse_integer_list(std::string_view text, std::string_view what) {
    return parse_list<long long>(text, what);
}

std::string format_shortest(double value) {
    std::array<char, 64> buffer{};
    auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

std::string format_sig12(double value) {
    std::array<char, 64> buffer{};
    const int written = std::snprintf(buffer.data(), buffer.size(), "%.12g", value);
    return std::string(buffer.data(), static_cast<std::size_t>(written));
}

}  // namespace asx
