#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace frugal::detail {

[[nodiscard]] inline std::string_view trim(std::string_view sv) noexcept {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!sv.empty() && is_space(sv.front())) {
        sv.remove_prefix(1);
    }
    while (!sv.empty() && is_space(sv.back())) {
        sv.remove_suffix(1);
    }
    return sv;
}

[[nodiscard]] inline std::string to_lower(std::string_view sv) {
    std::string out{ sv };
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[nodiscard]] inline bool iequals(std::string_view a, std::string_view b) noexcept {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) { return std::tolower(x) == std::tolower(y); });
}

[[nodiscard]] inline bool istarts_with(std::string_view sv, std::string_view prefix) noexcept {
    return sv.size() >= prefix.size() && iequals(sv.substr(0, prefix.size()), prefix);
}

/// Strict full-string double parse; accepts a leading '+'.
[[nodiscard]] inline std::optional<double> parse_double(std::string_view sv) noexcept {
    sv = trim(sv);
    if (!sv.empty() && sv.front() == '+') {
        sv.remove_prefix(1);
    }
    if (sv.empty()) {
        return std::nullopt;
    }
    double value{};
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc{} || ptr != sv.data() + sv.size()) {
        return std::nullopt;
    }
    return value;
}

[[nodiscard]] inline std::optional<long long> parse_int(std::string_view sv) noexcept {
    sv = trim(sv);
    if (!sv.empty() && sv.front() == '+') {
        sv.remove_prefix(1);
    }
    long long value{};
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (sv.empty() || ec != std::errc{} || ptr != sv.data() + sv.size()) {
        return std::nullopt;
    }
    return value;
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view sv, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = sv.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(sv.substr(start));
            break;
        }
        parts.push_back(sv.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

}  // namespace frugal::detail
