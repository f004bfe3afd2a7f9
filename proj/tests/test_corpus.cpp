#include <cctype>

#include "doctest.h"
#include "polorient/corpus.h"
#include "polorient/errors.h"
#include "polorient/rng.h"
#include "support.h"

using namespace polorient;

namespace {

std::string tweet_line(const std::string& id, const std::string& author, const std::string& text,
                       const std::string& extra = "") {
  return R"({"kind":"tweet","tweet_id":")" + id + R"(","author_id":"a_)" + author +
         R"(","author_screen_name":")" + author + R"(","created_at":"2014-04-01T10:00:00Z","text":")" + text +
         "\"" + extra + "}";
}

// Second tokenizer: byte scanner treating bytes >= 0x80 as letters, used on
// fixtures whose only non-ASCII text is letters.
std::vector<std::string> scanner_tokens(const std::string& text, const std::set<std::string>& stop) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto letter = [](unsigned char c) { return c >= 0x80 || std::isalnum(c); };
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string word = text.substr(i, j - i);
    i = j;
    std::size_t a = 0;
    while (a < word.size() && !letter(word[a]) && word[a] != '#' && word[a] != '@') ++a;
    if (a == word.size() || word[a] == '#' || word[a] == '@') continue;
    std::size_t b = word.size();
    while (b > a && !letter(word[b - 1])) --b;
    std::string tok;
    for (std::size_t k = a; k < b; ++k) {
      const unsigned char c = word[k];
      tok += c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    }
    if (tok.rfind("http", 0) == 0 || tok.rfind("www.", 0) == 0) continue;
    if (stop.contains(tok)) continue;
    out.push_back(tok);
  }
  return out;
}

}  // namespace

TEST_CASE("tokenize drops entities, urls and stopwords") {
  const auto s = Stoplist::defaults();
  CHECK(tokenize("RT @user Modi ka rally http://t.co/x #NaMo", s) == std::vector<std::string>{"modi", "rally"});
  CHECK(tokenize("", s).empty());
  CHECK(tokenize("  \t\n ", s).empty());
  CHECK(tokenize("\"Hello,\" (world)! www.aap.org HTTPS://X", s) == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("...!!! -- ?", s).empty());
  CHECK(tokenize("don't stop-me", s) == std::vector<std::string>{"don't", "stop-me"});
  CHECK(tokenize("&amp; AMP amp", s).empty());
  // Unicode whitespace separates tokens; Devanagari letters are kept.
  CHECK(tokenize("मोदी सरकार　vote", s) == std::vector<std::string>{"मोदी", "सरकार", "vote"});
}

TEST_CASE("tokenize matches a character-scanner oracle on 50 tweets") {
  const std::vector<std::string> pieces = {"Modi",  "KEJRIWAL", "rally,", "(Delhi)", "#NaMo",  "@aap",
                                           "RT",    "ka",       "ki",     "http://t.co/ab", "www.x.in",
                                           "vote!", "\"hope\"", "bjp's",  "...",    "जय",    "हिंद!",
                                           "--",    "2014",     "ke",     "a-b",    "&amp;", "?"};
  const std::set<std::string> stop = {"rt", "amp", "ka", "ke", "ki"};
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::string text;
    const std::size_t n = 1 + rng.uniform_index(12);
    for (std::size_t k = 0; k < n; ++k) {
      text += pieces[rng.uniform_index(pieces.size())];
      text += rng.bernoulli(0.2) ? "  " : (rng.bernoulli(0.1) ? "\t" : " ");
    }
    CHECK(tokenize(text, Stoplist::defaults()) == scanner_tokens(text, stop));
  }
}

TEST_CASE("tokenize properties") {
  const auto s = Stoplist::defaults();
  Rng rng(5);
  const std::vector<std::string> words = {"modi", "rally", "jhaadu", "vote", "2014", "delhi", "don't"};
  for (int t = 0; t < 30; ++t) {
    std::vector<std::string> tokens;
    for (std::size_t k = 0; k < 1 + rng.uniform_index(8); ++k) tokens.push_back(words[rng.uniform_index(words.size())]);
    std::string joined;
    for (const auto& w : tokens) joined += w + " ";
    CHECK(tokenize(joined, s) == tokens);  // idempotent on clean tokens
  }
  for (const auto& tok : tokenize("RT @a #b http://c www.d rt AMP ka real", s)) {
    CHECK_FALSE(s.contains(tok));
    CHECK(tok.front() != '#');
    CHECK(tok.front() != '@');
  }
}

TEST_CASE("extract_entities") {
  auto e = extract_entities("#AKasksModi @ArvindKejriwal #akasksmodi");
  CHECK(e.hashtags == std::vector<std::string>{"akasksmodi"});
  CHECK(e.mentions == std::vector<std::string>{"arvindkejriwal"});
  e = extract_entities("no entities here");
  CHECK(e.hashtags.empty());
  CHECK(e.mentions.empty());
  e = extract_entities("RT @BJP4India: vote #NaMo, #AbKiBaar! @bjp4india");
  CHECK(e.hashtags == std::vector<std::string>{"namo", "abkibaar"});
  CHECK(e.mentions == std::vector<std::string>{"bjp4india"});
}

TEST_CASE("extract_entities agrees with structured fields on 100 texts") {
  Rng rng(17);
  const std::vector<std::string> tags = {"NaMo", "AAP", "inc", "Election2014", "modi4pm"};
  const std::vector<std::string> users = {"ArvindKejriwal", "narendramodi", "INCIndia", "user_1"};
  for (int i = 0; i < 100; ++i) {
    std::string text;
    std::vector<std::string> want_tags;
    std::vector<std::string> want_users;
    for (int k = 0; k < 6; ++k) {
      const auto r = rng.uniform_index(3);
      if (r == 0) {
        const auto& tag = tags[rng.uniform_index(tags.size())];
        text += "#" + tag + " ";
        auto lower = to_lower_ascii(tag);
        if (std::find(want_tags.begin(), want_tags.end(), lower) == want_tags.end()) want_tags.push_back(lower);
      } else if (r == 1) {
        const auto& u = users[rng.uniform_index(users.size())];
        text += "@" + u + ": ";
        auto lower = to_lower_ascii(u);
        if (std::find(want_users.begin(), want_users.end(), lower) == want_users.end()) want_users.push_back(lower);
      } else {
        text += "word ";
      }
    }
    const auto e = extract_entities(text);
    CHECK(e.hashtags == want_tags);
    CHECK(e.mentions == want_users);
  }
}

TEST_CASE("parse_corpus basics") {
  auto c = parse_corpus_text("", Strictness::kStrict);
  CHECK(c.tweets.empty());
  CHECK(c.profiles.empty());
  CHECK(c.skipped_count == 0);

  const std::string three = tweet_line("1", "Alice", "hi") + "\n{broken\n" + tweet_line("2", "bob", "yo") + "\n";
  c = parse_corpus_text(three, Strictness::kSkipMalformed);
  CHECK(c.tweets.size() == 2);
  CHECK(c.skipped_count == 1);
  CHECK(c.tweets[0].author_screen_name == "alice");
  CHECK_THROWS_WITH_AS(parse_corpus_text(three, Strictness::kStrict), doctest::Contains("line 2"), DataError);
}

TEST_CASE("parse_corpus normalizes entities and relations") {
  const auto line = tweet_line("1", "Alice", "RT @Bob: #NaMo rally",
                               R"(,"retweet_of":"@Bob","geo":{"lat":28.6,"lon":77.2})");
  auto c = parse_corpus_text(line, Strictness::kStrict);
  REQUIRE(c.tweets.size() == 1);
  const auto& t = c.tweets[0];
  CHECK(t.hashtags == std::vector<std::string>{"namo"});
  CHECK(t.mentions == std::vector<std::string>{"bob"});
  CHECK(t.retweet_of == std::optional<std::string>("bob"));
  REQUIRE(t.geo.has_value());
  CHECK(t.geo->lat == doctest::Approx(28.6));

  // Self-retweet is dropped to the no-retweet form.
  c = parse_corpus_text(tweet_line("2", "alice", "x", R"(,"retweet_of":"ALICE")"), Strictness::kStrict);
  CHECK_FALSE(c.tweets[0].retweet_of.has_value());

  // Structured entity fields win over the text.
  c = parse_corpus_text(tweet_line("3", "alice", "#a @b", R"(,"hashtags":["#X"],"mentions":["Y"])"),
                        Strictness::kStrict);
  CHECK(c.tweets[0].hashtags == std::vector<std::string>{"x"});
  CHECK(c.tweets[0].mentions == std::vector<std::string>{"y"});
}

TEST_CASE("parse_corpus rejects bad records") {
  const auto dup = tweet_line("1", "a", "x") + "\n" + tweet_line("1", "b", "y");
  CHECK_THROWS_AS(parse_corpus_text(dup, Strictness::kStrict), DataError);
  auto c = parse_corpus_text(dup, Strictness::kSkipMalformed);
  CHECK(c.tweets.size() == 1);
  CHECK(c.skipped_count == 1);

  for (const std::string& bad : {
           tweet_line("1", "a", "x", R"(,"geo":{"lat":91,"lon":0})"),
           std::string(R"({"kind":"tweet","tweet_id":"1"})"),
           std::string(R"({"kind":"retweet"})"),
           std::string(R"([1,2])"),
           std::string(R"({"kind":"profile","user_id":"1","screen_name":"a","followers_count":-1,"friends_count":0,"statuses_count":0})"),
       }) {
    CHECK_THROWS_AS(parse_corpus_text(bad, Strictness::kStrict), DataError);
    CHECK(parse_corpus_text(bad, Strictness::kSkipMalformed).skipped_count == 1);
  }

  const std::string profiles =
      R"({"kind":"profile","user_id":"1","screen_name":"A","followers_count":1,"friends_count":2,"statuses_count":3,"following":["@X"]})"
      "\n"
      R"({"kind":"profile","user_id":"2","screen_name":"a","followers_count":1,"friends_count":2,"statuses_count":3})";
  CHECK_THROWS_AS(parse_corpus_text(profiles, Strictness::kStrict), DataError);
  c = parse_corpus_text(profiles, Strictness::kSkipMalformed);
  REQUIRE(c.profiles.size() == 1);
  CHECK(c.profiles[0].following == std::set<std::string>{"x"});
}

TEST_CASE("parse_corpus never throws on arbitrary bytes in skip mode") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::string bytes;
    const auto n = rng.uniform_index(300);
    for (std::size_t i = 0; i < n; ++i) bytes += static_cast<char>(rng.uniform_index(256));
    if (trial % 3 == 0) bytes += "\n" + tweet_line("t" + std::to_string(trial), "u", "ok") + "\n";
    Corpus c;
    CHECK_NOTHROW(c = parse_corpus_text(bytes, Strictness::kSkipMalformed));
    // Every nonblank line is a record or a skip.
    std::size_t lines = 0;
    std::size_t start = 0;
    while (start < bytes.size()) {
      auto end = bytes.find('\n', start);
      if (end == std::string::npos) end = bytes.size();
      const auto line = bytes.substr(start, end - start);
      if (line.find_first_not_of(" \t\r\f\v") != std::string::npos) ++lines;
      start = end + 1;
    }
    CHECK(c.tweets.size() + c.profiles.size() + c.skipped_count == lines);
  }
}

TEST_CASE("1,000-record fixture round-trips byte-identically") {
  Rng rng(2024);
  std::vector<Tweet> written;
  std::string file;
  for (int i = 0; i < 1000; ++i) {
    Tweet t;
    t.tweet_id = "id" + std::to_string(i);
    t.author_id = std::to_string(rng.uniform_index(50));
    t.author_screen_name = "user" + t.author_id;
    t.created_at = 1393632000 + static_cast<Timestamp>(rng.uniform_index(86400 * 60));
    t.text = "tweet number " + std::to_string(i) + " नमो \"quoted\" \\ back";
    if (rng.bernoulli(0.5)) t.hashtags = {"namo", "aap"};
    if (rng.bernoulli(0.3)) t.mentions = {"someone"};
    if (rng.bernoulli(0.2)) t.retweet_of = "other";
    if (rng.bernoulli(0.1)) t.geo = GeoPoint{-12.25 + rng.uniform01(), 77.0 + rng.uniform01()};
    file += serialize_tweet(t) + "\n";
    written.push_back(t);
  }
  const auto parsed = parse_corpus_text(file, Strictness::kStrict);
  REQUIRE(parsed.tweets.size() == 1000);
  CHECK(parsed.tweets == written);
  std::string again;
  for (const auto& t : parsed.tweets) again += serialize_tweet(t) + "\n";
  CHECK(again == file);

  testsupport::TempDir dir;
  testsupport::spit(dir / "c.jsonl", file);
  CHECK(parse_corpus(dir / "c.jsonl", Strictness::kStrict).tweets == written);
  CHECK_THROWS_AS(parse_corpus(dir / "missing.jsonl", Strictness::kStrict), DataError);
}

TEST_CASE("stoplist loading") {
  testsupport::TempDir dir;
  testsupport::spit(dir / "stop.txt", "# comment\nThe\n\n  of  \n");
  const auto s = Stoplist::load(dir / "stop.txt");
  CHECK(s.contains("the"));
  CHECK(s.contains("of"));
  CHECK(s.contains("rt"));
  CHECK_FALSE(s.contains("# comment"));
}
