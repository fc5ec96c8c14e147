#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace beb {

/// Shortest round-trip decimal form; the same bits always print the same text.
inline std::string fmt_num(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed precision, for human-facing tables.
inline std::string fmt_fixed(double v, int digits) {
    if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

}  // namespace beb
