#include "polorient/timeutil.h"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "polorient/errors.h"

namespace polorient {
namespace {

int read_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) throw DataError("truncated timestamp: " + std::string(text));
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
  if (ec != std::errc() || ptr != text.data() + pos + count) {
    throw DataError("malformed timestamp: " + std::string(text));
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError("malformed timestamp: " + std::string(text));
  }
}

}  // namespace

int parse_tz_offset(std::string_view text) {
  if (text == "Z" || text == "z") return 0;
  if (text.empty() || (text[0] != '+' && text[0] != '-')) {
    throw DataError("malformed timezone offset: " + std::string(text));
  }
  const int sign = text[0] == '-' ? -1 : 1;
  int hours = read_digits(text, 1, 2);
  int minutes = 0;
  if (text.size() == 6 && text[3] == ':') {
    minutes = read_digits(text, 4, 2);
  } else if (text.size() == 5) {
    minutes = read_digits(text, 3, 2);
  } else if (text.size() != 3) {
    throw DataError("malformed timezone offset: " + std::string(text));
  }
  if (hours > 23 || minutes > 59) throw DataError("timezone offset out of range: " + std::string(text));
  return sign * (hours * 3600 + minutes * 60);
}

std::string format_tz_offset(int tz_offset_seconds) {
  if (tz_offset_seconds == 0) return "Z";
  const char sign = tz_offset_seconds < 0 ? '-' : '+';
  const int magnitude = tz_offset_seconds < 0 ? -tz_offset_seconds : tz_offset_seconds;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%02d:%02d", sign, magnitude / 3600, (magnitude % 3600) / 60);
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  using namespace std::chrono;
  const int y = read_digits(text, 0, 4);
  expect(text, 4, '-');
  const int mo = read_digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_digits(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' ')) {
    throw DataError("malformed timestamp: " + std::string(text));
  }
  const int hh = read_digits(text, 11, 2);
  expect(text, 13, ':');
  const int mi = read_digits(text, 14, 2);
  expect(text, 16, ':');
  const int ss = read_digits(text, 17, 2);
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  if (pos >= text.size()) throw DataError("timestamp lacks offset: " + std::string(text));
  const int offset = parse_tz_offset(text.substr(pos));

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) {
    throw DataError("timestamp out of range: " + std::string(text));
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + hh * 3600 + mi * 60 + ss - offset;
}

std::string format_rfc3339(Timestamp ts, int tz_offset_seconds) {
  using namespace std::chrono;
  const Timestamp local = ts + tz_offset_seconds;
  const std::int64_t days = floor_div(local, 86400);
  const std::int64_t secs = local - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>((secs % 3600) / 60),
                static_cast<int>(secs % 60));
  return std::string(buf) + format_tz_offset(tz_offset_seconds);
}

}  // namespace polorient
