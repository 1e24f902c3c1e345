#pragma once

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>

namespace mechcert::csv {

/// Six significant digits; infinities print as `inf` / `-inf`.
[[nodiscard]] inline std::string format_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

[[nodiscard]] inline std::string format_number(const std::optional<double>& v, const char* missing) {
    return v ? format_number(*v) : std::string(missing);
}

inline void write_row(std::ostream& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        out << (first ? "" : ",") << format_number(v);
        first = false;
    }
    out << '\n';
}

}  // namespace mechcert::csv
