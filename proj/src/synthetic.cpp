#include "polorient/synthetic.h"

#include <algorithm>
#include <cstdio>
#include "json.hpp"

#include "polorient/errors.h"
#include "polorient/report.h"
#include "polorient/rng.h"

namespace polorient {
namespace {

constexpr std::size_t kSharedVocabulary = 500;
constexpr std::size_t kPartyVocabulary = 30;
constexpr double kSeedTargetShare = 0.3;
constexpr double kHashtagRate = 0.35;

const std::vector<std::string>& syllables() {
  static const std::vector<std::string> kSyllables = {"ba", "lo", "mi", "ne", "su", "ta",
                                                       "ri", "po", "de", "gu", "ha", "vo"};
  return kSyllables;
}

// Distinct three-syllable pseudo-word per index.
std::string pseudo_word(std::size_t index) {
  const auto& s = syllables();
  const std::size_t b = s.size();
  return s[index % b] + s[(index / b) % b] + s[(index / (b * b)) % b];
}

const std::vector<std::string>& generic_hashtags() {
  static const std::vector<std::string> kTags = {"election2014", "india", "loksabha", "vote",
                                                 "indiadecides", "news"};
  return kTags;
}

const std::vector<std::string>& cities() {
  static const std::vector<std::string> kCities = {"New Delhi", "Mumbai", "Bangalore", "Varanasi",
                                                   "Kolkata",   "Chennai", "Lucknow"};
  return kCities;
}

struct Account {
  std::string user_id;
  std::string screen_name;
  Label party;
  bool seed = false;
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.uniform_index(items.size())];
}

Label rival(Rng& rng, Label party) {
  std::vector<Label> others;
  for (Label p : kParties) {
    if (p != party) others.push_back(p);
  }
  return pick(rng, others);
}

Label noisy(Rng& rng, Label truth, double noise) {
  if (rng.bernoulli(noise)) return kAllLabels[rng.uniform_index(kAllLabels.size())];
  return truth;
}

double probability(const nlohmann::json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw ConfigError(std::string("synthetic spec: ") + key + " must be a number");
  return doc[key].get<double>();
}

std::size_t count(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
    throw ConfigError("synthetic spec: " + key + " must be an integer >= 1");
  }
  return value.get<std::size_t>();
}

}  // namespace

SyntheticSpec SyntheticSpec::bjp_heavy() {
  SyntheticSpec spec;
  spec.users_per_party = {{Label::kAap, 133}, {Label::kBjp, 447}, {Label::kCong, 33}};
  return spec;
}

SyntheticSpec SyntheticSpec::preset(std::string_view name) {
  if (name == "default") return defaults();
  if (name == "bjp-heavy") return bjp_heavy();
  throw ConfigError("unknown synthetic preset '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
  auto check_p = [](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("synthetic spec: " + what + " must be in [0, 1]");
  };
  check_p(p_intra, "p_intra");
  check_p(p_cross, "p_cross");
  check_p(annotator_noise, "annotator_noise");
  if (p_intra + p_cross > 1.0) throw ConfigError("synthetic spec: p_intra + p_cross exceeds 1");
  for (Label party : kParties) {
    auto u = users_per_party.find(party);
    if (u == users_per_party.end() || u->second < 1) {
      throw ConfigError("synthetic spec: " + std::string(to_string(party)) + " needs at least 1 user");
    }
    auto s = vocab_skew.find(party);
    if (s == vocab_skew.end()) {
      throw ConfigError("synthetic spec: missing vocab_skew for " + std::string(to_string(party)));
    }
    check_p(s->second, "vocab_skew");
    if (1.5 * s->second > 1.0) throw ConfigError("synthetic spec: vocab_skew must be at most 2/3");
  }
  if (users_per_party.size() != kParties.size()) throw ConfigError("synthetic spec: parties must be AAP, BJP, CONG");
  if (tweets_per_user < 1) throw ConfigError("synthetic spec: tweets_per_user must be >= 1");
  if (days < 1) throw ConfigError("synthetic spec: days must be >= 1");
}

SyntheticSpec SyntheticSpec::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("synthetic spec must be a JSON object");
  SyntheticSpec spec = doc.contains("preset") ? preset(doc["preset"].get<std::string>()) : defaults();
  if (doc.contains("users_per_party")) {
    const auto& u = doc["users_per_party"];
    if (u.is_number()) {
      for (Label p : kParties) spec.users_per_party[p] = count(u, "users_per_party");
    } else if (u.is_object()) {
      for (const auto& [key, value] : u.items()) {
        auto label = parse_label(key);
        if (!label || !is_party(*label)) throw ConfigError("synthetic spec: unknown party '" + key + "'");
        spec.users_per_party[*label] = count(value, "users_per_party." + key);
      }
    } else {
      throw ConfigError("synthetic spec: users_per_party must be a number or an object");
    }
  }
  if (doc.contains("tweets_per_user")) spec.tweets_per_user = count(doc["tweets_per_user"], "tweets_per_user");
  spec.p_intra = probability(doc, "p_intra", spec.p_intra);
  spec.p_cross = probability(doc, "p_cross", spec.p_cross);
  spec.annotator_noise = probability(doc, "annotator_noise", spec.annotator_noise);
  if (doc.contains("vocab_skew")) {
    const auto& v = doc["vocab_skew"];
    if (v.is_number()) {
      for (Label p : kParties) spec.vocab_skew[p] = v.get<double>();
    } else if (v.is_object()) {
      for (const auto& [key, value] : v.items()) {
        auto label = parse_label(key);
        if (!label || !is_party(*label) || !value.is_number()) {
          throw ConfigError("synthetic spec: bad vocab_skew entry '" + key + "'");
        }
        spec.vocab_skew[*label] = value.get<double>();
      }
    } else {
      throw ConfigError("synthetic spec: vocab_skew must be a number or an object");
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("synthetic spec: seed must be a nonnegative integer");
    spec.rng_seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("start")) {
    try {
      spec.start = parse_rfc3339(doc["start"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("synthetic spec: bad start: ") + e.what());
    }
  }
  if (doc.contains("days")) spec.days = static_cast<std::int64_t>(count(doc["days"], "days"));
  spec.validate();
  return spec;
}

std::string SyntheticSpec::to_json() const {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json users;
  nlohmann::ordered_json skew;
  for (Label p : kParties) {
    users[std::string(to_string(p))] = users_per_party.at(p);
    skew[std::string(to_string(p))] = vocab_skew.at(p);
  }
  doc["users_per_party"] = users;
  doc["tweets_per_user"] = tweets_per_user;
  doc["p_intra"] = p_intra;
  doc["p_cross"] = p_cross;
  doc["vocab_skew"] = skew;
  doc["annotator_noise"] = annotator_noise;
  doc["seed"] = rng_seed;
  doc["start"] = format_rfc3339(start);
  doc["days"] = days;
  return doc.dump(2) + "\n";
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticCorpus out;
  Rng rng(derive_seed(spec.rng_seed, 0x5eed));

  // Ordinary users with shuffled party assignment, then seed accounts.
  std::vector<Label> parties;
  for (Label p : kParties) parties.insert(parties.end(), spec.users_per_party.at(p), p);
  rng.shuffle(parties);
  std::vector<Account> accounts;
  char buf[32];
  for (std::size_t i = 0; i < parties.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%05zu", i + 1);
    accounts.push_back({std::string("u") + buf, std::string("user") + buf, parties[i], false});
  }
  const std::size_t ordinary = accounts.size();
  for (Label p : kParties) {
    for (const auto& seed : out.lexicon.terms(p).seed_accounts) {
      accounts.push_back({"s_" + seed, seed, p, true});
    }
  }
  std::map<Label, std::vector<std::size_t>> members;
  std::map<Label, std::vector<std::size_t>> seeds;
  for (std::size_t i = 0; i < accounts.size(); ++i) {
    (accounts[i].seed ? seeds : members)[accounts[i].party].push_back(i);
  }

  std::vector<std::string> shared;
  for (std::size_t i = 0; i < kSharedVocabulary; ++i) shared.push_back(pseudo_word(i));
  // Zipf-like cumulative weights over the shared vocabulary.
  std::vector<double> cumulative;
  double total = 0.0;
  for (std::size_t r = 0; r < shared.size(); ++r) cumulative.push_back(total += 1.0 / static_cast<double>(r + 1));
  std::map<Label, std::vector<std::string>> party_words;
  std::map<Label, std::vector<std::string>> party_tags;
  std::size_t next_word = kSharedVocabulary;
  for (Label p : kParties) {
    const auto& terms = out.lexicon.terms(p);
    party_words[p].assign(terms.keywords.begin(), terms.keywords.end());
    for (std::size_t i = 0; i < kPartyVocabulary; ++i) party_words[p].push_back(pseudo_word(next_word++));
    party_tags[p].assign(terms.hashtags.begin(), terms.hashtags.end());
  }

  auto shared_word = [&]() -> const std::string& {
    const double x = rng.uniform01() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    return shared[std::min<std::size_t>(it - cumulative.begin(), shared.size() - 1)];
  };
  auto target_in = [&](Label party, std::size_t self) -> std::size_t {
    if (rng.bernoulli(kSeedTargetShare)) return pick(rng, seeds[party]);
    const auto& pool = members[party];
    if (pool.size() == 1 && pool[0] == self) return pick(rng, seeds[party]);
    for (;;) {
      std::size_t t = pick(rng, pool);
      if (t != self) return t;
    }
  };

  const std::int64_t span = spec.days * 86400;
  for (std::size_t a = 0; a < accounts.size(); ++a) {
    const auto& acc = accounts[a];
    const double skew = spec.vocab_skew.at(acc.party);
    for (std::size_t k = 0; k < spec.tweets_per_user; ++k) {
      Tweet t;
      t.author_id = acc.user_id;
      t.author_screen_name = acc.screen_name;
      t.created_at = spec.start + static_cast<Timestamp>(rng.uniform_index(span));

      std::vector<std::string> words;
      const std::size_t n_words = 6 + rng.uniform_index(9);
      for (std::size_t w = 0; w < n_words; ++w) {
        const double r = rng.uniform01();
        if (r < skew) {
          words.push_back(pick(rng, party_words[acc.party]));
        } else if (r < 1.5 * skew) {
          words.push_back(pick(rng, party_words[rival(rng, acc.party)]));
        } else {
          words.push_back(shared_word());
        }
      }
      if (rng.bernoulli(kHashtagRate)) {
        const double r = rng.uniform01();
        if (r < 0.5) {
          t.hashtags.push_back(pick(rng, party_tags[acc.party]));
        } else if (r < 0.65) {
          t.hashtags.push_back(pick(rng, party_tags[rival(rng, acc.party)]));
        } else {
          t.hashtags.push_back(pick(rng, generic_hashtags()));
        }
      }

      std::optional<std::size_t> target;
      const double r = rng.uniform01();
      if (r < spec.p_intra) {
        target = target_in(acc.party, a);
      } else if (r < spec.p_intra + spec.p_cross) {
        target = target_in(rival(rng, acc.party), a);
      }
      std::string text;
      if (target) {
        const auto& name = accounts[*target].screen_name;
        t.mentions.push_back(name);
        if (rng.bernoulli(0.5)) {
          t.retweet_of = name;
          text = "RT @" + name + ": ";
        } else {
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(words.size() + 1)),
                       "@" + name);
        }
      }
      for (std::size_t w = 0; w < words.size(); ++w) text += (w ? " " : "") + words[w];
      for (const auto& h : t.hashtags) text += " #" + h;
      t.text = std::move(text);
      if (rng.bernoulli(0.05)) {
        t.geo = GeoPoint{8.0 + 27.0 * rng.uniform01(), 68.0 + 29.0 * rng.uniform01()};
      }
      out.tweets.push_back(std::move(t));
    }

    UserProfile profile;
    profile.user_id = acc.user_id;
    profile.screen_name = acc.screen_name;
    profile.followers_count = static_cast<std::int64_t>(acc.seed ? 100000 + rng.uniform_index(900000)
                                                                 : rng.uniform_index(1000));
    profile.friends_count = static_cast<std::int64_t>(rng.uniform_index(800));
    profile.statuses_count = static_cast<std::int64_t>(spec.tweets_per_user + rng.uniform_index(5000));
    for (Label p : kParties) {
      const double follow = p == acc.party ? 0.5 : 0.08;
      for (std::size_t s : seeds[p]) {
        if (s != a && rng.bernoulli(follow)) profile.following.insert(accounts[s].screen_name);
      }
    }
    for (int f = 0; f < 3; ++f) {
      const std::size_t other = rng.uniform_index(ordinary);
      if (other != a) profile.following.insert(accounts[other].screen_name);
    }
    if (rng.bernoulli(0.5)) profile.location = pick(rng, cities());
    out.profiles.push_back(std::move(profile));
  }

  std::stable_sort(out.tweets.begin(), out.tweets.end(),
                   [](const Tweet& x, const Tweet& y) { return x.created_at < y.created_at; });
  for (std::size_t i = 0; i < out.tweets.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "t%07zu", i + 1);
    out.tweets[i].tweet_id = buf;
  }

  // Ordinary users only; accounts are in user_id order already.
  for (std::size_t a = 0; a < ordinary; ++a) {
    const auto& acc = accounts[a];
    const Label pro = acc.party;
    const Label anti = rng.bernoulli(0.7) ? rival(rng, acc.party) : Label::kCantSay;
    out.planted_pro[acc.user_id] = pro;
    out.planted_anti[acc.user_id] = anti;
    for (const char* annotator : {"a1", "a2", "a3"}) {
      Annotation ann;
      ann.user_id = acc.user_id;
      ann.annotator_id = annotator;
      ann.pro = noisy(rng, pro, spec.annotator_noise);
      ann.anti = noisy(rng, anti, spec.annotator_noise);
      out.annotations.push_back(std::move(ann));
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_synthetic(const SyntheticCorpus& corpus,
                                                   const SyntheticSpec& spec,
                                                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());

  std::string jsonl;
  for (const auto& p : corpus.profiles) jsonl += serialize_profile(p) + "\n";
  for (const auto& t : corpus.tweets) jsonl += serialize_tweet(t) + "\n";

  std::string annotations = "user_id,annotator_id,pro,anti\n";
  for (const auto& a : corpus.annotations) {
    annotations += a.user_id + "," + a.annotator_id + "," + std::string(to_string(a.pro)) + "," +
                   std::string(to_string(a.anti)) + "\n";
  }

  std::map<std::string, std::string> names;
  for (const auto& p : corpus.profiles) names[p.user_id] = p.screen_name;
  std::string truth = "user_id,screen_name,pro,anti\n";
  for (const auto& [user, pro] : corpus.planted_pro) {
    truth += user + "," + names[user] + "," + std::string(to_string(pro)) + "," +
             std::string(to_string(corpus.planted_anti.at(user))) + "\n";
  }

  const std::vector<std::pair<std::string, std::string>> files = {
      {"corpus.jsonl", jsonl},
      {"annotations.csv", annotations},
      {"lexicon.json", corpus.lexicon.to_json() + "\n"},
      {"truth.csv", truth},
      {"synth_spec.json", spec.to_json()}};
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    written.push_back(dir / name);
    write_file(written.back(), content);
  }
  return written;
}

}  // namespace polorient
