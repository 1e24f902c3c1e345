#pragma once

// Flat `key = value` configuration files with `#` comments.

#include <algorithm>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mechcert::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Entry {
    std::string key;  ///< normalized: underscores become dashes
    std::string value;
    int line = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

[[nodiscard]] inline std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

/// Entries in file order. Duplicate keys and lines without `=` are errors.
[[nodiscard]] inline std::vector<Entry> parse(std::istream& in) {
    std::vector<Entry> entries;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const auto line = detail::trim(raw);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        Entry e{normalize_key(detail::trim(line.substr(0, eq))), detail::trim(line.substr(eq + 1)), line_no};
        if (e.key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        if (e.value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + e.key + "' has no value");
        }
        const bool dup = std::any_of(entries.begin(), entries.end(), [&](const Entry& x) { return x.key == e.key; });
        if (dup) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace mechcert::config
