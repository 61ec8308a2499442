#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "hydra/errors.hpp"

namespace hydra {

/// Shortest round-trip decimal form of x, locale-independent.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw Error("not a number: '" + std::string(text) + "'");
    return value;
}

inline std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw Error("not a non-negative integer: '" + std::string(text) + "'");
    return value;
}

inline std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

} // namespace hydra
