#include "nimbus/timeutil.hpp"

#include <charconv>

#include <fmt/format.h>

#include "nimbus/error.hpp"

namespace nimbus {
namespace {

using namespace std::chrono;

// Reads exactly `width` digits at `pos`.
bool read_int(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + width, out);
  return ec == std::errc{} && ptr == s.data() + pos + width;
}

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  throw InputError("time", fmt::format("invalid {} '{}'", what, text));
}

year_month_day checked_date(int y, int m, int d, std::string_view text, std::string_view what) {
  year_month_day date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!date.ok()) bad(what, text);
  return date;
}

}  // namespace

year_month_day parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !read_int(text, 0, 4, y) ||
      !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
    bad("date", text);
  }
  return checked_date(y, m, d, text, "date");
}

Timestamp parse_iso8601(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS then Z or +HH:MM
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() < 20 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':' ||
      !read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
      !read_int(text, 11, 2, h) || !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, s)) {
    bad("timestamp", text);
  }
  if (h > 23 || mi > 59 || s > 59) bad("timestamp", text);
  const auto date = checked_date(y, mo, d, text, "timestamp");

  minutes offset{0};
  const auto zone = text.substr(19);
  if (zone == "Z") {
    offset = minutes{0};
  } else {
    int oh = 0, om = 0;
    if (zone.size() != 6 || (zone[0] != '+' && zone[0] != '-') || zone[3] != ':' ||
        !read_int(zone, 1, 2, oh) || !read_int(zone, 4, 2, om) || oh > 23 || om > 59) {
      bad("timestamp", text);
    }
    offset = hours{oh} + minutes{om};
    if (zone[0] == '-') offset = -offset;
  }
  const auto local = sys_days{date} + hours{h} + minutes{mi} + seconds{s};
  return Timestamp{local - offset};
}

std::string format_iso8601(Timestamp t, minutes utc_offset) {
  const auto local = t + utc_offset;
  const auto day_point = floor<days>(local);
  const year_month_day date{day_point};
  const hh_mm_ss tod{local - day_point};
  const auto off = utc_offset.count();
  const char sign = off < 0 ? '-' : '+';
  const auto abs_off = off < 0 ? -off : off;
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}{}{:02}:{:02}", int(date.year()),
                     unsigned(date.month()), unsigned(date.day()), tod.hours().count(),
                     tod.minutes().count(), tod.seconds().count(), sign, abs_off / 60, abs_off % 60);
}

int day_of_year(year_month_day date) {
  const sys_days jan1{date.year() / January / 1};
  return static_cast<int>((sys_days{date} - jan1).count()) + 1;
}

}  // namespace nimbus
