#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace flame {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp make_timestamp(int year, int month, int day, int hour, int minute, int second,
                         int millisecond = 0);

/// "2023:10:14 10:00:05" plus an optional SubSecTime digit string ("25" -> .250).
/// Returns nullopt for malformed input or years outside 2000..2100.
std::optional<Timestamp> parse_exif_datetime(std::string_view datetime, std::string_view subsec = {});

/// "YYYY:MM:DD HH:MM:SS" (no sub-second part).
std::string format_exif_datetime(Timestamp ts);

/// Three-digit millisecond string for SubSecTimeOriginal.
std::string format_exif_subsec(Timestamp ts);

/// "2023-10-14T10:00:05.250Z"
std::string format_iso8601(Timestamp ts);
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Seconds between two timestamps (a - b).
inline double seconds_between(Timestamp a, Timestamp b) {
    return std::chrono::duration<double>(a - b).count();
}

bool timestamp_in_range(Timestamp ts);

}  // namespace flame
