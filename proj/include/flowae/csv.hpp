#ifndef FLOWAE_CSV_HPP
#define FLOWAE_CSV_HPP

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "common.hpp"

namespace flowae::csv {

// Fields never contain commas or quotes (addresses, numbers, tags), so
// no quoting support.
inline std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Reads one line, stripping a trailing '\r'. Returns false at EOF.
inline bool read_line(std::istream& in, std::string& line)
{
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

/// Row/column context attached to every parse failure.
struct Where {
    std::size_t row;
    std::string_view column;
};

[[noreturn]] inline void fail(const Where& w, std::string_view what)
{
    throw ParseError("row " + std::to_string(w.row) + ", column '" + std::string(w.column)
                     + "': " + std::string(what));
}

template <typename Int>
Int parse_int(std::string_view s, const Where& w, std::int64_t lo, std::int64_t hi)
{
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        fail(w, "expected an integer, got '" + std::string(s) + "'");
    }
    if (v < lo || v > hi) {
        fail(w, "value " + std::string(s) + " outside [" + std::to_string(lo) + ", "
                    + std::to_string(hi) + "]");
    }
    return static_cast<Int>(v);
}

inline std::uint64_t parse_u64(std::string_view s, const Where& w)
{
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        fail(w, "expected an unsigned integer, got '" + std::string(s) + "'");
    }
    return v;
}

inline double parse_double(std::string_view s, const Where& w)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        fail(w, "expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace flowae::csv

#endif
