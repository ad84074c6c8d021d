#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>

namespace frule {

// Shortest decimal form that reads back to the same double.
inline std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_hash(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace frule
