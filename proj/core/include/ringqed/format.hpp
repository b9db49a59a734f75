#pragma once

#include <charconv>
#include <string>

namespace ringqed {

// Locale-independent shortest-exact-ish formatting with 17 significant
// digits; parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

} // namespace ringqed
