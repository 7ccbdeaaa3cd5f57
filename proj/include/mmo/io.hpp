#ifndef MMO_IO_HPP
#define MMO_IO_HPP

#include "mmo/core_model.hpp"
#include "mmo/error.hpp"

#include <array>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmo::io {

// Shortest round-trip representation; identical bytes for identical doubles.
inline auto format_double(double v) -> std::string
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return {buf.data(), ptr};
}

inline auto trim(std::string_view s) -> std::string_view
{
    auto const ws = " \t\r\n";
    auto const b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline auto split(std::string_view line, char sep) -> std::vector<std::string_view>
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto const pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline auto try_parse_double(std::string_view s) -> std::optional<double>
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto const* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return v;
}

inline auto parse_double(std::string_view s, std::string const& where) -> double
{
    if (auto v = try_parse_double(s)) {
        return *v;
    }
    throw Error(ErrorKind::Format, where + ": cannot parse number '" + std::string(s) + "'");
}

inline auto join_levels(Configuration const& c) -> std::string
{
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i != 0) {
            out += ';';
        }
        out += std::to_string(c[i]);
    }
    return out;
}

inline auto parse_levels(std::string_view s, std::string const& where) -> Configuration
{
    std::vector<Configuration::Level> levels;
    for (auto part : split(s, ';')) {
        Configuration::Level v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
            throw Error(ErrorKind::Format, where + ": bad configuration '" + std::string(s) + "'");
        }
        levels.push_back(v);
    }
    return Configuration(std::move(levels));
}

} // namespace mmo::io

#endif
