#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace nimbus {

/// UTC instant at one-second resolution. All series are stored in UTC.
using Timestamp = std::chrono::sys_seconds;

/// Parses ISO-8601 `YYYY-MM-DDTHH:MM:SS` followed by `Z` or `+HH:MM`/`-HH:MM`.
/// A space is accepted in place of `T`. Throws InputError.
Timestamp parse_iso8601(std::string_view text);

/// Formats `t` as local clock time at `utc_offset`, with explicit offset suffix.
std::string format_iso8601(Timestamp t, std::chrono::minutes utc_offset);

/// Parses a calendar date `YYYY-MM-DD`. Throws InputError.
std::chrono::year_month_day parse_date(std::string_view text);

/// 1-based ordinal day within the year of `date`.
int day_of_year(std::chrono::year_month_day date);

/// Signed difference `later - earlier` in (fractional) minutes.
inline double minutes_between(Timestamp earlier, Timestamp later) {
  return std::chrono::duration<double, std::ratio<60>>(later - earlier).count();
}

}  // namespace nimbus
