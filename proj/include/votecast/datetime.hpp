#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "votecast/errors.hpp"

namespace votecast {

using Timestamp = std::chrono::sys_seconds;

struct ParsedInstant {
    Timestamp value{};
    bool date_only = false;
};

namespace detail {

inline int parse_digits(std::string_view s, size_t pos, size_t count, const char* what,
                        std::string_view whole) {
    if (pos + count > s.size()) {
        throw DataError("invalid timestamp '" + std::string(whole) + "': truncated " + what);
    }
    int v = 0;
    for (size_t i = pos; i < pos + count; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') {
            throw DataError("invalid timestamp '" + std::string(whole) + "': bad " + what);
        }
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace detail

/// Parses a restricted ISO-8601 instant: "YYYY-MM-DD" optionally followed by
/// "THH:MM:SS" (or a space separator) and an optional "Z" or "+HH:MM"/"-HH:MM"
/// offset. Offsets are converted to UTC; bare instants are taken as UTC.
inline ParsedInstant parse_instant(std::string_view s) {
    using namespace std::chrono;
    const std::string_view whole = s;

    const int y = detail::parse_digits(s, 0, 4, "year", whole);
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
        throw DataError("invalid timestamp '" + std::string(whole) + "': expected YYYY-MM-DD");
    }
    const int mo = detail::parse_digits(s, 5, 2, "month", whole);
    const int d = detail::parse_digits(s, 8, 2, "day", whole);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw DataError("invalid timestamp '" + std::string(whole) + "': no such date");
    }

    ParsedInstant out;
    Timestamp t = sys_days{ymd};
    size_t pos = 10;
    if (pos == s.size()) {
        out.value = t;
        out.date_only = true;
        return out;
    }
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') {
        throw DataError("invalid timestamp '" + std::string(whole) + "': bad date/time separator");
    }
    ++pos;
    if (s.size() < pos + 8 || s[pos + 2] != ':' || s[pos + 5] != ':') {
        throw DataError("invalid timestamp '" + std::string(whole) + "': expected HH:MM:SS");
    }
    const int hh = detail::parse_digits(s, pos, 2, "hour", whole);
    const int mi = detail::parse_digits(s, pos + 3, 2, "minute", whole);
    const int ss = detail::parse_digits(s, pos + 6, 2, "second", whole);
    if (hh > 23 || mi > 59 || ss > 60) {
        throw DataError("invalid timestamp '" + std::string(whole) + "': time out of range");
    }
    t += hours{hh} + minutes{mi} + seconds{ss};
    pos += 8;

    if (pos < s.size()) {
        const char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            const int oh = detail::parse_digits(s, pos + 1, 2, "offset hour", whole);
            size_t opos = pos + 3;
            if (opos < s.size() && s[opos] == ':') ++opos;
            const int om = detail::parse_digits(s, opos, 2, "offset minute", whole);
            const auto offset = hours{oh} + minutes{om};
            t += (c == '+') ? -offset : offset;
            pos = opos + 2;
        }
    }
    if (pos != s.size()) {
        throw DataError("invalid timestamp '" + std::string(whole) + "': trailing characters");
    }
    out.value = t;
    return out;
}

inline Timestamp parse_iso8601(std::string_view s) { return parse_instant(s).value; }

/// Canonical UTC form, "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    const sys_days day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss tod{t - day};
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()),
                  static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

} // namespace votecast
