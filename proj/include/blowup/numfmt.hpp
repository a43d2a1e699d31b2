#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace blowup {

/// 17 significant digits; strtod of the result reproduces the double exactly.
inline std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_g(double x, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

}  // namespace blowup
