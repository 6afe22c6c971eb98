#pragma once

#include <bipcomm/errors.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace bipcomm::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(delim, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

/// Calls `row(fields, line_number)` for every non-blank, non-comment line.
/// Lines starting with '#' are comments. When `header` is set, the first
/// data line is skipped.
inline void for_each_row(const std::string& path, char delim, bool header,
                         const std::function<void(const std::vector<std::string>&, std::size_t)>& row) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    bool skipped_header = !header;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        row(split(t, delim), lineno);
    }
}

inline long long parse_int(const std::string& s, const std::string& path, std::size_t line) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(path, line, "expected integer, got '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, const std::string& path, std::size_t line) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(path, line, "expected number, got '" + s + "'");
    }
}

/// Shortest round-trip representation; stable across runs.
inline std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

} // namespace bipcomm::csv
