#include "polorient/analytics.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <unordered_map>

#include "polorient/errors.h"

namespace polorient {
namespace {

constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kDay = 86400;

std::chrono::year_month_day civil(std::int64_t local_days) {
  return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{local_days}}};
}

std::int64_t days_of(std::chrono::year_month_day ymd) {
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::string format_value(double v) {
  char buf[32];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
  }
  return buf;
}

// Gap-free series over [first, last] bucket with the given counts.
TimeSeries fill_series(const std::map<Timestamp, double>& counts, Timestamp first, Timestamp last,
                       Granularity granularity, int tz_offset) {
  TimeSeries series{granularity, tz_offset, {}};
  for (Timestamp b = first; b <= last; b = next_bucket(b, granularity, tz_offset)) {
    auto it = counts.find(b);
    series.points.push_back({b, it == counts.end() ? 0.0 : it->second});
  }
  return series;
}

RankedCounts rank(const std::unordered_map<std::string, std::int64_t>& counts, std::size_t k) {
  RankedCounts ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second || (a.second == b.second && a.first < b.first);
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace

std::string_view to_string(Granularity granularity) {
  switch (granularity) {
    case Granularity::kHour: return "hour";
    case Granularity::kDay: return "day";
    case Granularity::kWeek: return "week";
    case Granularity::kMonth: return "month";
  }
  return "day";
}

Granularity parse_granularity(std::string_view text) {
  if (text == "hour") return Granularity::kHour;
  if (text == "day") return Granularity::kDay;
  if (text == "week") return Granularity::kWeek;
  if (text == "month") return Granularity::kMonth;
  throw ConfigError("granularity must be hour, day, week or month; got '" + std::string(text) + "'");
}

double TimeSeries::sum() const {
  double s = 0.0;
  for (const auto& p : points) s += p.value;
  return s;
}

Timestamp bucket_start(Timestamp ts, Granularity granularity, int tz_offset) {
  const std::int64_t local = ts + tz_offset;
  std::int64_t start = 0;
  switch (granularity) {
    case Granularity::kHour:
      start = floor_div(local, kHour) * kHour;
      break;
    case Granularity::kDay:
      start = floor_div(local, kDay) * kDay;
      break;
    case Granularity::kWeek: {
      // Day 0 (1970-01-01) was a Thursday; Monday is 3 days earlier.
      const std::int64_t days = floor_div(local, kDay);
      const std::int64_t since_monday = days + 3 - floor_div(days + 3, 7) * 7;
      start = (days - since_monday) * kDay;
      break;
    }
    case Granularity::kMonth: {
      const auto ymd = civil(floor_div(local, kDay));
      start = days_of(ymd.year() / ymd.month() / std::chrono::day{1}) * kDay;
      break;
    }
  }
  return start - tz_offset;
}

Timestamp next_bucket(Timestamp bucket, Granularity granularity, int tz_offset) {
  switch (granularity) {
    case Granularity::kHour: return bucket + kHour;
    case Granularity::kDay: return bucket + kDay;
    case Granularity::kWeek: return bucket + 7 * kDay;
    case Granularity::kMonth: {
      const auto ymd = civil(floor_div(bucket + tz_offset, kDay));
      const auto next = std::chrono::year_month{ymd.year(), ymd.month()} + std::chrono::months{1};
      return days_of(next / std::chrono::day{1}) * kDay - tz_offset;
    }
  }
  return bucket;
}

VolumeStats volume_series(const std::vector<Tweet>& tweets, Granularity granularity, int tz_offset) {
  VolumeStats out;
  out.series = {granularity, tz_offset, {}};
  if (tweets.empty()) return out;
  std::map<Timestamp, double> counts;
  for (const auto& t : tweets) counts[bucket_start(t.created_at, granularity, tz_offset)] += 1.0;
  out.series = fill_series(counts, counts.begin()->first, counts.rbegin()->first, granularity, tz_offset);

  const auto n = static_cast<double>(out.series.points.size());
  out.mean = out.series.sum() / n;
  double ss = 0.0;
  for (const auto& p : out.series.points) ss += (p.value - out.mean) * (p.value - out.mean);
  out.stddev = std::sqrt(ss / n);
  return out;
}

std::int64_t DayHourMatrix::total() const {
  std::int64_t s = 0;
  for (const auto& row : counts) {
    for (auto c : row) s += c;
  }
  return s;
}

DayHourMatrix day_hour_matrix(const std::vector<Tweet>& tweets, int tz_offset) {
  DayHourMatrix m;
  for (const auto& t : tweets) {
    const std::int64_t local = t.created_at + tz_offset;
    const std::int64_t days = floor_div(local, kDay);
    const std::int64_t weekday = days + 4 - floor_div(days + 4, 7) * 7;  // 0 = Sunday
    const std::int64_t hour = (local - days * kDay) / kHour;
    ++m.counts[weekday][hour];
  }
  return m;
}

std::map<Label, TimeSeries> party_mentions(const std::vector<Tweet>& tweets,
                                           const PartyLexicon& lexicon, Granularity granularity,
                                           int tz_offset, const Stoplist& stoplist) {
  std::map<Label, std::map<Timestamp, double>> counts;
  Timestamp first = 0;
  Timestamp last = 0;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& t = tweets[i];
    const auto bucket = bucket_start(t.created_at, granularity, tz_offset);
    if (i == 0 || bucket < first) first = bucket;
    if (i == 0 || bucket > last) last = bucket;
    const auto tokens = tokenize(t.text, stoplist);
    for (Label party : kParties) {
      const auto& terms = lexicon.terms(party);
      const bool hit =
          std::any_of(tokens.begin(), tokens.end(), [&](const auto& w) { return terms.keywords.contains(w); }) ||
          std::any_of(t.hashtags.begin(), t.hashtags.end(),
                      [&](const auto& h) { return terms.hashtags.contains(h); });
      if (hit) counts[party][bucket] += 1.0;
    }
  }
  std::map<Label, TimeSeries> out;
  for (Label party : kParties) {
    out[party] = tweets.empty() ? TimeSeries{granularity, tz_offset, {}}
                                : fill_series(counts[party], first, last, granularity, tz_offset);
  }
  return out;
}

std::vector<WindowTop> top_hashtags(const std::vector<Tweet>& tweets, Granularity window,
                                    std::size_t k, int tz_offset) {
  if (k == 0) throw ConfigError("top_hashtags needs k >= 1");
  std::map<Timestamp, std::unordered_map<std::string, std::int64_t>> per_window;
  for (const auto& t : tweets) {
    if (t.hashtags.empty()) continue;
    auto& counts = per_window[bucket_start(t.created_at, window, tz_offset)];
    for (const auto& h : t.hashtags) ++counts[h];
  }
  std::vector<WindowTop> out;
  for (const auto& [start, counts] : per_window) out.push_back({start, rank(counts, k)});
  return out;
}

UniqueUserStats unique_user_stats(const std::vector<Tweet>& tweets, std::optional<YearMonth> month,
                                  std::size_t top_n, int tz_offset) {
  std::unordered_map<std::string, std::int64_t> counts;
  UniqueUserStats out;
  for (const auto& t : tweets) {
    if (month) {
      const auto ymd = civil(floor_div(t.created_at + tz_offset, kDay));
      if (static_cast<int>(ymd.year()) != month->year ||
          static_cast<unsigned>(ymd.month()) != month->month) {
        continue;
      }
    }
    ++counts[t.author_screen_name];
    ++out.tweet_count;
  }
  out.unique_users = counts.size();
  out.top = rank(counts, top_n);
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DataError("mean of an empty series");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DataError("pearson: series lengths differ");
  if (xs.size() < 2) throw DataError("pearson: need at least 2 points");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("pearson: zero variance");
  const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  // An exactly linear pair can land a few ulps short of +-1; that gap is
  // rounding, not signal.
  if (1.0 - std::fabs(r) <= 16 * std::numeric_limits<double>::epsilon()) return r > 0 ? 1.0 : -1.0;
  return std::clamp(r, -1.0, 1.0);
}

TimeSeries pct_change(const TimeSeries& series) {
  TimeSeries out{series.granularity, series.tz_offset, {}};
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    if (!(series.points[i].value > 0.0)) {
      throw DataError("pct_change: nonpositive value at " +
                      format_rfc3339(series.points[i].bucket_start, series.tz_offset));
    }
    if (i == 0) continue;
    const double prev = series.points[i - 1].value;
    out.points.push_back({series.points[i].bucket_start, 100.0 * (series.points[i].value - prev) / prev});
  }
  return out;
}

std::string series_csv(const TimeSeries& series, const std::string& value_name) {
  std::string out = "bucket_start," + value_name + "\n";
  for (const auto& p : series.points) {
    out += format_rfc3339(p.bucket_start, series.tz_offset) + "," + format_value(p.value) + "\n";
  }
  return out;
}

std::string party_series_csv(const std::map<Label, TimeSeries>& series) {
  std::string out = "bucket_start";
  for (const auto& [party, s] : series) out += "," + std::string(to_string(party));
  out += "\n";
  if (series.empty()) return out;
  const auto& first = series.begin()->second;
  for (std::size_t i = 0; i < first.points.size(); ++i) {
    out += format_rfc3339(first.points[i].bucket_start, first.tz_offset);
    for (const auto& [party, s] : series) out += "," + format_value(s.points[i].value);
    out += "\n";
  }
  return out;
}

std::string day_hour_csv(const DayHourMatrix& matrix) {
  std::string out = "day";
  for (int h = 0; h < 24; ++h) out += "," + std::to_string(h);
  out += "\n";
  for (int d = 1; d <= 7; ++d) {
    out += std::to_string(d);
    for (int h = 0; h < 24; ++h) out += "," + std::to_string(matrix.at(d, h));
    out += "\n";
  }
  return out;
}

std::string top_hashtags_csv(const std::vector<WindowTop>& windows, int tz_offset) {
  std::string out = "window_start,rank,hashtag,count\n";
  for (const auto& w : windows) {
    for (std::size_t r = 0; r < w.top.size(); ++r) {
      out += format_rfc3339(w.window_start, tz_offset) + "," + std::to_string(r + 1) + "," +
             w.top[r].first + "," + std::to_string(w.top[r].second) + "\n";
    }
  }
  return out;
}

std::string ranked_csv(const RankedCounts& ranked, const std::string& name_column) {
  std::string out = "rank," + name_column + ",count\n";
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    out += std::to_string(r + 1) + "," + ranked[r].first + "," + std::to_string(ranked[r].second) + "\n";
  }
  return out;
}

}  // namespace polorient
