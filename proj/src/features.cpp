#include "polorient/features.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "polorient/errors.h"

namespace polorient {
namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

FeatureMatrix build_matrix(const UserTerms& users, std::size_t min_user_support,
                           Strictness strictness, const char* what) {
  FeatureMatrix matrix;
  std::vector<TermCounts> counts;
  counts.reserve(users.size());
  for (const auto& [user, terms] : users) {
    if (terms.empty()) {
      if (strictness == Strictness::kStrict) {
        throw DataError("user " + user + " has no " + what + "; term frequency is undefined");
      }
      matrix.dropped_users.push_back(user);
      continue;
    }
    matrix.user_ids.push_back(user);
    counts.push_back(count_terms(terms));
  }
  matrix.user_count = counts.size();

  // Vocabulary pass: |U_i| over all terms, then prune.
  std::map<std::string, std::size_t> term_users;
  for (const auto& c : counts) {
    for (const auto& [term, n] : c.counts) ++term_users[term];
  }
  std::map<std::string, std::size_t> column_of;
  for (const auto& [term, n_users] : term_users) {
    if (n_users < min_user_support) continue;
    column_of.emplace(term, matrix.vocabulary.size());
    matrix.vocabulary.push_back({term, n_users, idf(matrix.user_count, n_users)});
  }

  matrix.rows.resize(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    const auto total = static_cast<double>(counts[r].token_total);
    auto& row = matrix.rows[r];
    for (const auto& [term, n] : counts[r].counts) {
      auto it = column_of.find(term);
      if (it == column_of.end()) continue;
      const double tf = static_cast<double>(n) / total;
      row.push_back({it->second, tf * matrix.vocabulary[it->second].idf});
    }
  }
  return matrix;
}

std::set<std::string> normalized_set(const nlohmann::json& arr, const std::string& where) {
  std::set<std::string> out;
  if (arr.is_null()) return out;
  if (!arr.is_array()) throw ConfigError("lexicon: " + where + " must be an array");
  for (const auto& v : arr) {
    if (!v.is_string()) throw ConfigError("lexicon: " + where + " entries must be strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

std::set<std::string> clean(const std::set<std::string>& raw) {
  std::set<std::string> out;
  for (const auto& entry : raw) {
    std::string_view view = entry;
    while (!view.empty() && (view.front() == '#' || view.front() == '@')) view.remove_prefix(1);
    std::string lower = to_lower_ascii(view);
    if (!lower.empty()) out.insert(std::move(lower));
  }
  return out;
}

}  // namespace

TermCounts count_terms(const std::vector<std::string>& terms) {
  TermCounts out;
  for (const auto& t : terms) ++out.counts[t];
  out.token_total = terms.size();
  return out;
}

double idf(std::size_t user_count, std::size_t term_user_count) {
  return std::log(static_cast<double>(user_count) / (1.0 + static_cast<double>(term_user_count)));
}

std::vector<double> FeatureMatrix::dense_row(std::size_t row) const {
  std::vector<double> out(vocabulary.size(), 0.0);
  for (const auto& e : rows.at(row)) out[e.column] = e.value;
  return out;
}

std::vector<std::vector<double>> FeatureMatrix::to_dense() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(dense_row(r));
  return out;
}

FeatureMatrix build_text_matrix(const UserTerms& tokenized_users, std::size_t min_user_support,
                                Strictness strictness) {
  return build_matrix(tokenized_users, min_user_support, strictness, "tokens");
}

FeatureMatrix build_hashtag_matrix(const UserTerms& user_hashtags, std::size_t min_user_support,
                                   Strictness strictness) {
  return build_matrix(user_hashtags, min_user_support, strictness, "hashtags");
}

MatrixTables matrix_tables(const FeatureMatrix& matrix) {
  std::ostringstream t;
  std::ostringstream v;
  std::ostringstream r;
  t << "row\tcolumn\tvalue\n";
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    for (const auto& e : matrix.rows[i]) t << i << '\t' << e.column << '\t' << format_double(e.value) << '\n';
  }
  v << "column\tterm\tuser_count\tidf\n";
  for (std::size_t c = 0; c < matrix.vocabulary.size(); ++c) {
    const auto& entry = matrix.vocabulary[c];
    v << c << '\t' << entry.term << '\t' << entry.user_count << '\t' << format_double(entry.idf) << '\n';
  }
  r << "row\tuser_id\n";
  for (std::size_t i = 0; i < matrix.user_ids.size(); ++i) r << i << '\t' << matrix.user_ids[i] << '\n';
  return {t.str(), v.str(), r.str()};
}

std::vector<std::filesystem::path> export_matrix(const FeatureMatrix& matrix,
                                                 const std::filesystem::path& stem) {
  const auto tables = matrix_tables(matrix);
  const std::vector<std::pair<std::filesystem::path, const std::string*>> files = {
      {stem.string() + ".triplets.tsv", &tables.triplets},
      {stem.string() + ".vocab.tsv", &tables.vocabulary},
      {stem.string() + ".rows.tsv", &tables.rows}};
  std::vector<std::filesystem::path> written;
  for (const auto& [path, content] : files) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << *content)) throw Error(ErrorKind::kInternal, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

PartyLexicon::PartyLexicon(std::map<Label, PartyTerms> parties) {
  for (Label party : kParties) {
    auto it = parties.find(party);
    PartyTerms terms;
    if (it != parties.end()) {
      terms.keywords = clean(it->second.keywords);
      terms.hashtags = clean(it->second.hashtags);
      terms.seed_accounts = clean(it->second.seed_accounts);
    }
    parties_.emplace(party, std::move(terms));
  }
  if (parties.contains(Label::kCantSay)) throw ConfigError("lexicon: CANT_SAY is not a party");
  std::map<std::string, Label> owners;
  for (const auto& [party, terms] : parties_) {
    for (const auto& account : terms.seed_accounts) {
      auto [it, inserted] = owners.emplace(account, party);
      if (!inserted) {
        throw ConfigError("lexicon: seed account " + account + " listed under both " +
                          std::string(to_string(it->second)) + " and " +
                          std::string(to_string(party)));
      }
    }
  }
}

PartyLexicon PartyLexicon::defaults() {
  std::map<Label, PartyTerms> parties;
  parties[Label::kAap] = {
      {"aap", "kejriwal", "arvind", "aamaadmiparty", "jhaadu", "broom"},
      {"aap", "akasksmodi", "aapsweep", "kejriwal", "aamaadmiparty", "mufflerman"},
      {"arvindkejriwal", "aamaadmiparty", "msisodia", "ashutosh83b"}};
  parties[Label::kBjp] = {
      {"bjp", "modi", "narendra", "namo", "rajnath", "nda"},
      {"namo", "bjp", "modi4pm", "abkibaarmodisarkar", "narendramodi", "namonamo"},
      {"narendramodi", "bjp4india", "rajnathsingh", "arunjaitley"}};
  parties[Label::kCong] = {
      {"congress", "inc", "rahul", "gandhi", "sonia", "upa"},
      {"congress", "inc", "rahulgandhi", "raga", "incindia", "upa"},
      {"incindia", "bewithrg", "digvijaya_28", "shashitharoor"}};
  return PartyLexicon(std::move(parties));
}

PartyLexicon PartyLexicon::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("lexicon is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("lexicon must be a JSON object keyed by party");
  std::map<Label, PartyTerms> parties;
  for (const auto& [key, value] : doc.items()) {
    auto label = parse_label(key);
    if (!label || !is_party(*label)) throw ConfigError("lexicon: unknown party '" + key + "'");
    if (!value.is_object()) throw ConfigError("lexicon: entry for " + key + " must be an object");
    PartyTerms terms;
    terms.keywords = normalized_set(value.value("keywords", nlohmann::json()), key + ".keywords");
    terms.hashtags = normalized_set(value.value("hashtags", nlohmann::json()), key + ".hashtags");
    terms.seed_accounts =
        normalized_set(value.value("seed_accounts", nlohmann::json()), key + ".seed_accounts");
    parties.emplace(*label, std::move(terms));
  }
  return PartyLexicon(std::move(parties));
}

PartyLexicon PartyLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read lexicon " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

const PartyTerms& PartyLexicon::terms(Label party) const {
  auto it = parties_.find(party);
  if (it == parties_.end()) throw ConfigError("lexicon has no party " + std::string(to_string(party)));
  return it->second;
}

std::map<std::string, Label> PartyLexicon::seed_owners() const {
  std::map<std::string, Label> out;
  for (const auto& [party, terms] : parties_) {
    for (const auto& account : terms.seed_accounts) out.emplace(account, party);
  }
  return out;
}

std::string PartyLexicon::to_json() const {
  nlohmann::ordered_json doc;
  for (const auto& [party, terms] : parties_) {
    doc[std::string(to_string(party))] = {{"keywords", terms.keywords},
                                          {"hashtags", terms.hashtags},
                                          {"seed_accounts", terms.seed_accounts}};
  }
  return doc.dump(2);
}

std::array<double, kUserFeatureCount> UserFeatureVector::values() const {
  return {friends_count, followers_count, following_aap, following_bjp, following_cong, aap_words,
          bjp_words,     cong_words,      aap_hashtags,  bjp_hashtags,  cong_hashtags};
}

const std::array<const char*, kUserFeatureCount>& UserFeatureVector::names() {
  static const std::array<const char*, kUserFeatureCount> kNames = {
      "friends_count", "followers_count", "following_aap", "following_bjp",
      "following_cong", "aap_words",      "bjp_words",     "cong_words",
      "aap_hashtags",  "bjp_hashtags",    "cong_hashtags"};
  return kNames;
}

UserFeatureVector user_feature_vector(const UserProfile& profile, const std::vector<Tweet>& tweets,
                                      const PartyLexicon& lexicon, const Stoplist& stoplist) {
  UserFeatureVector v;
  v.friends_count = static_cast<double>(profile.friends_count);
  v.followers_count = static_cast<double>(profile.followers_count);

  auto follows_any = [&](Label party) {
    for (const auto& account : lexicon.terms(party).seed_accounts) {
      if (profile.following.contains(account)) return 1.0;
    }
    return 0.0;
  };
  v.following_aap = follows_any(Label::kAap);
  v.following_bjp = follows_any(Label::kBjp);
  v.following_cong = follows_any(Label::kCong);

  const auto& aap = lexicon.terms(Label::kAap);
  const auto& bjp = lexicon.terms(Label::kBjp);
  const auto& cong = lexicon.terms(Label::kCong);
  for (const auto& tweet : tweets) {
    for (const auto& token : tokenize(tweet.text, stoplist)) {
      v.aap_words += aap.keywords.contains(token);
      v.bjp_words += bjp.keywords.contains(token);
      v.cong_words += cong.keywords.contains(token);
    }
    for (const auto& tag : tweet.hashtags) {
      v.aap_hashtags += aap.hashtags.contains(tag);
      v.bjp_hashtags += bjp.hashtags.contains(tag);
      v.cong_hashtags += cong.hashtags.contains(tag);
    }
  }
  return v;
}

}  // namespace polorient
