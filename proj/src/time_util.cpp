#include "hsp/time_util.hpp"

#include <charconv>
#include <cstdio>

namespace hsp {

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

namespace {

bool read_int(std::string_view& s, char sep, int& out) {
  auto pos = s.find(sep);
  auto part = pos == std::string_view::npos ? s : s.substr(0, pos);
  auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
  if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty())
    return false;
  s = pos == std::string_view::npos ? std::string_view{} : s.substr(pos + 1);
  return true;
}

}  // namespace

std::optional<TimeUs> parse_date_us(std::string_view text) {
  char sep = text.find('/') != std::string_view::npos ? '/' : '-';
  int y = 0, m = 0, d = 0;
  std::string_view rest = text;
  if (!read_int(rest, sep, y) || !read_int(rest, sep, m) ||
      !read_int(rest, sep, d) || !rest.empty())
    return std::nullopt;
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  return days_from_civil(y, m, d) * 86400 * kUsPerSec;
}

std::optional<TimeUs> parse_time_us(std::string_view text) {
  auto t_pos = text.find('T');
  if (t_pos == std::string_view::npos) return parse_date_us(text);
  auto date = parse_date_us(text.substr(0, t_pos));
  if (!date) return std::nullopt;
  std::string_view rest = text.substr(t_pos + 1);
  int h = 0, mi = 0, s = 0;
  if (!read_int(rest, ':', h) || !read_int(rest, ':', mi) ||
      !read_int(rest, ':', s) || !rest.empty())
    return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60)
    return std::nullopt;
  return *date + (static_cast<TimeUs>(h) * 3600 + mi * 60 + s) * kUsPerSec;
}

std::string format_time_us(TimeUs t) {
  TimeUs sec = t / kUsPerSec;
  TimeUs us = t % kUsPerSec;
  if (us < 0) {
    us += kUsPerSec;
    --sec;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%lld.%06lld", static_cast<long long>(sec),
                static_cast<long long>(us));
  return buf;
}

std::string format_date(TimeUs t) {
  std::int64_t z = t / (86400 * kUsPerSec) + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                static_cast<long long>(y + (m <= 2)), m, d);
  return buf;
}

}  // namespace hsp
