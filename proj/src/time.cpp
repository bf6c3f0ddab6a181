#include "flame/time.hpp"

#include <charconv>
#include <cstdio>

#include <fmt/format.h>

namespace flame {

namespace {

using namespace std::chrono;

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

std::optional<Timestamp> build(int y, int mo, int d, int h, int mi, int s, int ms) {
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60 || ms < 0 || ms > 999) {
        return std::nullopt;
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    Timestamp ts = time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} +
                   seconds{s} + milliseconds{ms};
    if (!timestamp_in_range(ts)) return std::nullopt;
    return ts;
}

struct Civil {
    int year, month, day, hour, minute, second, millisecond;
};

Civil to_civil(Timestamp ts) {
    auto day_point = floor<days>(ts);
    year_month_day ymd{day_point};
    auto rem = ts - day_point;
    auto h = duration_cast<hours>(rem);
    rem -= h;
    auto m = duration_cast<minutes>(rem);
    rem -= m;
    auto s = duration_cast<seconds>(rem);
    rem -= s;
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(h.count()),
            static_cast<int>(m.count()), static_cast<int>(s.count()),
            static_cast<int>(rem.count())};
}

// Left-aligned fraction digits -> milliseconds ("5" -> 500, "25" -> 250, "1234" -> 123).
std::optional<int> fraction_to_ms(std::string_view digits) {
    if (digits.empty()) return 0;
    int ms = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        int digit = 0;
        if (i < digits.size()) {
            char c = digits[i];
            if (c < '0' || c > '9') return std::nullopt;
            digit = c - '0';
        }
        ms = ms * 10 + digit;
    }
    for (std::size_t i = 3; i < digits.size(); ++i) {
        if (digits[i] < '0' || digits[i] > '9') return std::nullopt;
    }
    return ms;
}

}  // namespace

Timestamp make_timestamp(int year, int month, int day, int hour, int minute, int second,
                         int millisecond) {
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                       std::chrono::day{static_cast<unsigned>(day)}};
    return time_point_cast<milliseconds>(sys_days{ymd}) + hours{hour} + minutes{minute} +
           seconds{second} + milliseconds{millisecond};
}

bool timestamp_in_range(Timestamp ts) {
    auto lo = make_timestamp(2000, 1, 1, 0, 0, 0);
    auto hi = make_timestamp(2101, 1, 1, 0, 0, 0);
    return ts >= lo && ts < hi;
}

std::optional<Timestamp> parse_exif_datetime(std::string_view dt, std::string_view subsec) {
    // Trailing NULs and spaces are common in the wild.
    while (!dt.empty() && (dt.back() == '\0' || dt.back() == ' ')) dt.remove_suffix(1);
    while (!subsec.empty() && (subsec.back() == '\0' || subsec.back() == ' ')) subsec.remove_suffix(1);
    if (dt.size() != 19 || dt[4] != ':' || dt[7] != ':' || dt[10] != ' ' || dt[13] != ':' ||
        dt[16] != ':') {
        return std::nullopt;
    }
    int y, mo, d, h, mi, s;
    if (!parse_int(dt.substr(0, 4), y) || !parse_int(dt.substr(5, 2), mo) ||
        !parse_int(dt.substr(8, 2), d) || !parse_int(dt.substr(11, 2), h) ||
        !parse_int(dt.substr(14, 2), mi) || !parse_int(dt.substr(17, 2), s)) {
        return std::nullopt;
    }
    auto ms = fraction_to_ms(subsec);
    if (!ms) return std::nullopt;
    return build(y, mo, d, h, mi, s, *ms);
}

std::string format_exif_datetime(Timestamp ts) {
    Civil c = to_civil(ts);
    return fmt::format("{:04}:{:02}:{:02} {:02}:{:02}:{:02}", c.year, c.month, c.day, c.hour,
                       c.minute, c.second);
}

std::string format_exif_subsec(Timestamp ts) { return fmt::format("{:03}", to_civil(ts).millisecond); }

std::string format_iso8601(Timestamp ts) {
    Civil c = to_civil(ts);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", c.year, c.month, c.day, c.hour,
                       c.minute, c.second, c.millisecond);
}

std::optional<Timestamp> parse_iso8601(std::string_view t) {
    if (t.size() < 19 || t[4] != '-' || t[7] != '-' || (t[10] != 'T' && t[10] != ' ') ||
        t[13] != ':' || t[16] != ':') {
        return std::nullopt;
    }
    int y, mo, d, h, mi, s;
    if (!parse_int(t.substr(0, 4), y) || !parse_int(t.substr(5, 2), mo) ||
        !parse_int(t.substr(8, 2), d) || !parse_int(t.substr(11, 2), h) ||
        !parse_int(t.substr(14, 2), mi) || !parse_int(t.substr(17, 2), s)) {
        return std::nullopt;
    }
    std::string_view rest = t.substr(19);
    std::string_view frac;
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        std::size_t n = 0;
        while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
        frac = rest.substr(0, n);
        rest.remove_prefix(n);
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return std::nullopt;
    auto ms = fraction_to_ms(frac);
    if (!ms) return std::nullopt;
    return build(y, mo, d, h, mi, s, *ms);
}

}  // namespace flame
