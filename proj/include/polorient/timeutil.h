#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace polorient {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

// Parses RFC 3339 ("2014-03-20T10:15:00Z", "2014-03-20T15:45:00+05:30",
// fractional seconds truncated). Throws DataError on malformed input.
Timestamp parse_rfc3339(std::string_view text);

// Formats `ts` shifted into the given offset; offset 0 prints "Z".
std::string format_rfc3339(Timestamp ts, int tz_offset_seconds = 0);

// Parses "+05:30", "-08:00", "Z", "+0530" into seconds east of UTC.
int parse_tz_offset(std::string_view text);
std::string format_tz_offset(int tz_offset_seconds);

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace polorient
