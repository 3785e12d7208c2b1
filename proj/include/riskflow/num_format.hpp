#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace riskflow {
namespace detail {

/// Shortest round-trip decimal form of a double. Deterministic across runs,
/// so file outputs built from it are byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail
} // namespace riskflow
