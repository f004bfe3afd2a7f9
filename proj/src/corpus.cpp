#include "polorient/corpus.h"

#include <fstream>
#include <iterator>
#include "json.hpp"
#include <sstream>
#include <unordered_set>

#include "polorient/errors.h"
#include "text_chars.h"

namespace polorient {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class MalformedRecord : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedRecord(std::string("missing field '") + key + "'");
  if (it->is_string()) {
    auto value = it->get<std::string>();
    if (value.empty()) throw MalformedRecord(std::string("empty field '") + key + "'");
    return value;
  }
  // Twitter ids are sometimes emitted as bare integers.
  if (it->is_number_integer()) return it->dump();
  throw MalformedRecord(std::string("field '") + key + "' is not a string");
}

std::int64_t require_count(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedRecord(std::string("missing field '") + key + "'");
  if (!it->is_number_integer()) throw MalformedRecord(std::string("field '") + key + "' is not an integer");
  auto value = it->get<std::int64_t>();
  if (value < 0) throw MalformedRecord(std::string("negative count '") + key + "'");
  return value;
}

// Strips any leading sigil and lowercases. The result must be a nonempty
// run with no further sigils.
std::string normalize_entity(const json& value, char sigil) {
  if (!value.is_string()) throw MalformedRecord("entity is not a string");
  std::string_view raw = value.get_ref<const std::string&>();
  while (!raw.empty() && raw.front() == sigil) raw.remove_prefix(1);
  std::string out = to_lower_ascii(raw);
  if (out.empty() || out.find('#') != std::string::npos || out.find('@') != std::string::npos) {
    throw MalformedRecord("invalid entity '" + value.get<std::string>() + "'");
  }
  return out;
}

std::vector<std::string> entity_list(const json& obj, const char* key, char sigil) {
  std::vector<std::string> out;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw MalformedRecord(std::string("field '") + key + "' is not an array");
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(normalize_entity(v, sigil));
  return out;
}

Tweet tweet_from_json(const json& obj) {
  Tweet t;
  t.tweet_id = require_string(obj, "tweet_id");
  t.author_id = require_string(obj, "author_id");
  t.author_screen_name = normalize_entity(obj.at("author_screen_name"), '@');
  const auto created = obj.at("created_at");
  if (!created.is_string()) throw MalformedRecord("created_at is not a string");
  try {
    t.created_at = parse_rfc3339(created.get<std::string>());
  } catch (const DataError& e) {
    throw MalformedRecord(e.what());
  }
  const auto& text = obj.at("text");
  if (!text.is_string()) throw MalformedRecord("text is not a string");
  t.text = text.get<std::string>();

  const bool has_hashtags = obj.contains("hashtags") && !obj["hashtags"].is_null();
  const bool has_mentions = obj.contains("mentions") && !obj["mentions"].is_null();
  if (!has_hashtags || !has_mentions) {
    Entities fallback = extract_entities(t.text);
    if (!has_hashtags) t.hashtags = std::move(fallback.hashtags);
    if (!has_mentions) t.mentions = std::move(fallback.mentions);
  }
  if (has_hashtags) t.hashtags = entity_list(obj, "hashtags", '#');
  if (has_mentions) t.mentions = entity_list(obj, "mentions", '@');

  if (auto it = obj.find("retweet_of"); it != obj.end() && !it->is_null()) {
    std::string target = normalize_entity(*it, '@');
    if (target != t.author_screen_name) t.retweet_of = std::move(target);
  }
  if (auto it = obj.find("geo"); it != obj.end() && !it->is_null()) {
    if (!it->is_object()) throw MalformedRecord("geo is not an object");
    const auto& lat = it->at("lat");
    const auto& lon = it->at("lon");
    if (!lat.is_number() || !lon.is_number()) throw MalformedRecord("geo coordinates not numeric");
    GeoPoint g{lat.get<double>(), lon.get<double>()};
    if (!(g.lat >= -90.0 && g.lat <= 90.0) || !(g.lon >= -180.0 && g.lon <= 180.0)) {
      throw MalformedRecord("geo coordinates out of range");
    }
    t.geo = g;
  }
  return t;
}

UserProfile profile_from_json(const json& obj) {
  UserProfile p;
  p.user_id = require_string(obj, "user_id");
  p.screen_name = normalize_entity(obj.at("screen_name"), '@');
  p.followers_count = require_count(obj, "followers_count");
  p.friends_count = require_count(obj, "friends_count");
  p.statuses_count = require_count(obj, "statuses_count");
  if (auto it = obj.find("following"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw MalformedRecord("following is not an array");
    for (const auto& v : *it) p.following.insert(normalize_entity(v, '@'));
  }
  if (auto it = obj.find("location"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedRecord("location is not a string");
    p.location = it->get<std::string>();
  }
  return p;
}

bool is_blank(std::string_view line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Stoplist::Stoplist(std::set<std::string> words) {
  for (const auto& w : words) add(w);
}

Stoplist Stoplist::defaults() { return Stoplist({"rt", "amp", "ka", "ke", "ki"}); }

Stoplist Stoplist::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read stoplist " + path.string());
  Stoplist out = defaults();
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) out.add(word);
  }
  return out;
}

void Stoplist::add(std::string_view word) {
  std::string lower = to_lower_ascii(word);
  if (!lower.empty()) words_.insert(std::move(lower));
}

bool Stoplist::contains(std::string_view word) const { return words_.find(word) != words_.end(); }

Corpus parse_corpus(const std::filesystem::path& path, Strictness strictness) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_corpus_text(content, strictness);
}

Corpus parse_corpus_text(std::string_view content, Strictness strictness) {
  Corpus corpus;
  std::unordered_set<std::string> tweet_ids;
  std::unordered_set<std::string> screen_names;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (is_blank(line)) continue;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    try {
      json obj = json::parse(line);
      if (!obj.is_object()) throw MalformedRecord("record is not an object");
      const auto kind = obj.value("kind", std::string());
      if (kind == "tweet") {
        Tweet t = tweet_from_json(obj);
        if (!tweet_ids.insert(t.tweet_id).second) {
          if (strictness == Strictness::kStrict) {
            throw DataError("line " + std::to_string(line_no) + ": duplicate tweet_id " + t.tweet_id);
          }
          ++corpus.skipped_count;
          continue;
        }
        corpus.tweets.push_back(std::move(t));
      } else if (kind == "profile") {
        UserProfile p = profile_from_json(obj);
        if (!screen_names.insert(p.screen_name).second) {
          if (strictness == Strictness::kStrict) {
            throw DataError("line " + std::to_string(line_no) + ": duplicate screen_name " +
                            p.screen_name);
          }
          ++corpus.skipped_count;
          continue;
        }
        corpus.profiles.push_back(std::move(p));
      } else {
        throw MalformedRecord("unknown record kind '" + kind + "'");
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      if (strictness == Strictness::kStrict) {
        throw DataError("line " + std::to_string(line_no) + ": " + e.what());
      }
      ++corpus.skipped_count;
    }
  }
  return corpus;
}

std::string serialize_tweet(const Tweet& tweet) {
  ordered_json obj;
  obj["kind"] = "tweet";
  obj["tweet_id"] = tweet.tweet_id;
  obj["author_id"] = tweet.author_id;
  obj["author_screen_name"] = tweet.author_screen_name;
  obj["created_at"] = format_rfc3339(tweet.created_at);
  obj["text"] = tweet.text;
  obj["hashtags"] = tweet.hashtags;
  obj["mentions"] = tweet.mentions;
  obj["retweet_of"] = tweet.retweet_of ? ordered_json(*tweet.retweet_of) : ordered_json(nullptr);
  if (tweet.geo) {
    obj["geo"] = {{"lat", tweet.geo->lat}, {"lon", tweet.geo->lon}};
  } else {
    obj["geo"] = nullptr;
  }
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string serialize_profile(const UserProfile& profile) {
  ordered_json obj;
  obj["kind"] = "profile";
  obj["user_id"] = profile.user_id;
  obj["screen_name"] = profile.screen_name;
  obj["followers_count"] = profile.followers_count;
  obj["friends_count"] = profile.friends_count;
  obj["statuses_count"] = profile.statuses_count;
  obj["following"] = profile.following;
  obj["location"] = profile.location ? ordered_json(*profile.location) : ordered_json(nullptr);
  return obj.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::vector<std::string> tokenize(std::string_view text, const Stoplist& stoplist) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    // Skip whitespace.
    auto cp = text::decode(text, pos);
    if (text::is_space(cp.value)) {
      pos += cp.length;
      continue;
    }
    const std::size_t begin = pos;
    while (pos < text.size()) {
      cp = text::decode(text, pos);
      if (text::is_space(cp.value)) break;
      pos += cp.length;
    }
    std::string_view raw = text.substr(begin, pos - begin);

    // Leading punctuation other than the entity sigils.
    std::size_t first = 0;
    while (first < raw.size()) {
      auto c = text::decode(raw, first);
      if (text::is_alnum(c.value) || c.value == '#' || c.value == '@') break;
      first += c.length;
    }
    if (first < raw.size() && (raw[first] == '#' || raw[first] == '@')) continue;

    std::size_t last = first;  // one past the last alphanumeric code point
    for (std::size_t i = first; i < raw.size();) {
      auto c = text::decode(raw, i);
      i += c.length;
      if (text::is_alnum(c.value)) last = i;
    }
    if (last <= first) continue;

    std::string token = to_lower_ascii(raw.substr(first, last - first));
    if (token.starts_with("http") || token.starts_with("www.")) continue;
    if (stoplist.contains(token)) continue;
    tokens.push_back(std::move(token));
  }
  return tokens;
}

Entities extract_entities(std::string_view raw_text) {
  Entities out;
  std::unordered_set<std::string> seen_tags;
  std::unordered_set<std::string> seen_mentions;
  std::size_t pos = 0;
  while (pos < raw_text.size()) {
    const char sigil = raw_text[pos];
    ++pos;
    if (sigil != '#' && sigil != '@') {
      // Advance over the rest of a multi-byte sequence, if any.
      while (pos < raw_text.size() && (static_cast<unsigned char>(raw_text[pos]) & 0xC0) == 0x80) ++pos;
      continue;
    }
    const std::size_t begin = pos;
    while (pos < raw_text.size()) {
      auto c = text::decode(raw_text, pos);
      if (!text::is_word(c.value)) break;
      pos += c.length;
    }
    if (pos == begin) continue;
    std::string entity = to_lower_ascii(raw_text.substr(begin, pos - begin));
    if (sigil == '#') {
      if (seen_tags.insert(entity).second) out.hashtags.push_back(std::move(entity));
    } else {
      if (seen_mentions.insert(entity).second) out.mentions.push_back(std::move(entity));
    }
  }
  return out;
}

}  // namespace polorient
