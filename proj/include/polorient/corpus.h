#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "polorient/timeutil.h"

namespace polorient {

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
  bool operator==(const GeoPoint&) const = default;
};

struct Tweet {
  std::string tweet_id;
  std::string author_id;
  std::string author_screen_name;  // lowercase
  Timestamp created_at = 0;
  std::string text;
  std::vector<std::string> hashtags;  // lowercase, no '#'
  std::vector<std::string> mentions;  // lowercase, no '@'
  std::optional<std::string> retweet_of;  // lowercase, never the author
  std::optional<GeoPoint> geo;

  bool operator==(const Tweet&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::string screen_name;  // lowercase
  std::int64_t followers_count = 0;
  std::int64_t friends_count = 0;
  std::int64_t statuses_count = 0;
  std::set<std::string> following;
  std::optional<std::string> location;

  bool operator==(const UserProfile&) const = default;
};

class Stoplist {
 public:
  // "rt", "amp", "ka", "ke", "ki".
  static Stoplist defaults();
  // One word per line; '#' starts a comment. Entries are added to the defaults.
  static Stoplist load(const std::filesystem::path& path);

  Stoplist() = default;
  explicit Stoplist(std::set<std::string> words);

  void add(std::string_view word);
  bool contains(std::string_view word) const;
  const std::set<std::string, std::less<>>& words() const { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
};

enum class Strictness { kStrict, kSkipMalformed };

struct Corpus {
  std::vector<Tweet> tweets;
  std::vector<UserProfile> profiles;
  std::size_t skipped_count = 0;
};

// Parses line-delimited JSON records discriminated by "kind" ("tweet" or
// "profile"). Blank lines are skipped. Output preserves line order.
Corpus parse_corpus(const std::filesystem::path& path, Strictness strictness);
Corpus parse_corpus_text(std::string_view content, Strictness strictness);

// One JSON object per call, no trailing newline. Keys in a fixed order so
// re-serialization is byte-stable.
std::string serialize_tweet(const Tweet& tweet);
std::string serialize_profile(const UserProfile& profile);

// Lowercase ASCII; non-ASCII bytes are kept as-is.
std::string to_lower_ascii(std::string_view text);

// Whitespace-split, lowercased word tokens with hashtags, mentions, URLs and
// stoplist words removed and surrounding punctuation stripped.
std::vector<std::string> tokenize(std::string_view text, const Stoplist& stoplist);

struct Entities {
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
};

// Fallback entity extraction from raw text: word-character runs after '#'
// and '@', lowercased, deduplicated in first-occurrence order.
Entities extract_entities(std::string_view raw_text);

}  // namespace polorient
