#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "hsp/route_record.hpp"

namespace hsp {

/// Half-open interval [start, end) in microseconds since epoch.
struct TimeSpanUs {
  TimeUs start = 0;
  TimeUs end = 0;

  bool contains(TimeUs t) const { return t >= start && t < end; }
  auto operator<=>(const TimeSpanUs&) const = default;
};

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, int month, int day);

// "YYYY-MM-DD" or "YYYY/MM/DD" at 00:00:00 UTC.
std::optional<TimeUs> parse_date_us(std::string_view text);

// "<date>T<HH:MM:SS>" or bare date; used by CLI window flags.
std::optional<TimeUs> parse_time_us(std::string_view text);

// Fixed-width "sec.micros" rendering used by every CSV export.
std::string format_time_us(TimeUs t);

std::string format_date(TimeUs t);

}  // namespace hsp
