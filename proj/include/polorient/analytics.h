#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polorient/corpus.h"
#include "polorient/features.h"
#include "polorient/labels.h"
#include "polorient/timeutil.h"

namespace polorient {

enum class Granularity { kHour, kDay, kWeek, kMonth };

std::string_view to_string(Granularity granularity);
Granularity parse_granularity(std::string_view text);

// India Standard Time, UTC+05:30.
inline constexpr int kDefaultTzOffset = 5 * 3600 + 30 * 60;

struct SeriesPoint {
  Timestamp bucket_start = 0;  // instant at which the local bucket begins
  double value = 0.0;
  bool operator==(const SeriesPoint&) const = default;
};

// Gap-free: consecutive buckets, missing ones carry 0.
struct TimeSeries {
  Granularity granularity = Granularity::kDay;
  int tz_offset = 0;
  std::vector<SeriesPoint> points;

  double sum() const;
};

// Start of the local bucket containing `ts`, as a UTC instant. Weeks start on
// Monday (ISO).
Timestamp bucket_start(Timestamp ts, Granularity granularity, int tz_offset);
Timestamp next_bucket(Timestamp bucket, Granularity granularity, int tz_offset);

struct VolumeStats {
  TimeSeries series;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

VolumeStats volume_series(const std::vector<Tweet>& tweets, Granularity granularity,
                          int tz_offset = kDefaultTzOffset);

// counts[day - 1][hour] with day 1 = Sunday ... 7 = Saturday, local time.
struct DayHourMatrix {
  std::array<std::array<std::int64_t, 24>, 7> counts{};

  std::int64_t at(int day, int hour) const { return counts.at(day - 1).at(hour); }
  std::int64_t total() const;
};

DayHourMatrix day_hour_matrix(const std::vector<Tweet>& tweets, int tz_offset = kDefaultTzOffset);

// A tweet counts for a party when any token matches one of its keywords or
// any hashtag one of its hashtags; a tweet may count for several parties.
// All parties share the corpus-wide bucket range.
std::map<Label, TimeSeries> party_mentions(const std::vector<Tweet>& tweets,
                                           const PartyLexicon& lexicon,
                                           Granularity granularity = Granularity::kWeek,
                                           int tz_offset = kDefaultTzOffset,
                                           const Stoplist& stoplist = Stoplist::defaults());

using RankedCounts = std::vector<std::pair<std::string, std::int64_t>>;

struct WindowTop {
  Timestamp window_start = 0;
  RankedCounts top;  // count desc, then name asc
};

// Windows without hashtags are omitted.
std::vector<WindowTop> top_hashtags(const std::vector<Tweet>& tweets,
                                    Granularity window = Granularity::kWeek, std::size_t k = 5,
                                    int tz_offset = kDefaultTzOffset);

struct YearMonth {
  int year = 1970;
  unsigned month = 1;
};

struct UniqueUserStats {
  std::int64_t tweet_count = 0;
  std::size_t unique_users = 0;
  RankedCounts top;  // author screen names, count desc, then name asc
};

// Restricted to one local calendar month when `month` is set.
UniqueUserStats unique_user_stats(const std::vector<Tweet>& tweets,
                                  std::optional<YearMonth> month = std::nullopt,
                                  std::size_t top_n = 5, int tz_offset = kDefaultTzOffset);

// Sample Pearson correlation, clamped to [-1, 1]; results within 16 ulp of
// +-1 are returned as exactly +-1. Throws DataError on
// length mismatch, fewer than 2 points or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// 100 * (v_t - v_{t-1}) / v_{t-1}; the first bucket is dropped. Throws
// DataError on a nonpositive value.
TimeSeries pct_change(const TimeSeries& series);

double mean(std::span<const double> values);

// Delimited-table renderings with header rows; timestamps in RFC 3339 at the
// series' offset.
std::string series_csv(const TimeSeries& series, const std::string& value_name);
std::string party_series_csv(const std::map<Label, TimeSeries>& series);
std::string day_hour_csv(const DayHourMatrix& matrix);
std::string top_hashtags_csv(const std::vector<WindowTop>& windows, int tz_offset);
std::string ranked_csv(const RankedCounts& ranked, const std::string& name_column);

}  // namespace polorient
