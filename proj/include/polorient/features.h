#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polorient/corpus.h"
#include "polorient/labels.h"

namespace polorient {

// Raw per-user term counts n_ij and their total.
struct TermCounts {
  std::map<std::string, std::size_t> counts;
  std::size_t token_total = 0;
};

TermCounts count_terms(const std::vector<std::string>& terms);

// Inverse user frequency ln(|U| / (1 + |U_i|)). Negative for terms used by
// (nearly) every user; kept as-is.
double idf(std::size_t user_count, std::size_t term_user_count);

struct VocabEntry {
  std::string term;
  std::size_t user_count = 0;  // |U_i|, counted before pruning
  double idf = 0.0;
};

struct SparseEntry {
  std::size_t column = 0;
  double value = 0.0;
  bool operator==(const SparseEntry&) const = default;
};

// Users as documents: one sparse TF-IDF row per user, columns sorted by term.
struct FeatureMatrix {
  std::vector<VocabEntry> vocabulary;
  std::size_t user_count = 0;  // |U|
  std::vector<std::vector<SparseEntry>> rows;
  std::vector<std::string> user_ids;  // row index -> user
  std::vector<std::string> dropped_users;  // users with no terms (lenient mode)

  std::size_t columns() const { return vocabulary.size(); }
  std::vector<double> dense_row(std::size_t row) const;
  std::vector<std::vector<double>> to_dense() const;
};

using UserTerms = std::vector<std::pair<std::string, std::vector<std::string>>>;

// Cells are (n_ij / token_total_j) * idf(|U|, |U_i|) for terms used by at
// least `min_user_support` distinct users. TF denominators count every term
// of the user, pruned or not. Users with zero terms are an error in strict
// mode and dropped (listed in dropped_users) otherwise.
FeatureMatrix build_text_matrix(const UserTerms& tokenized_users, std::size_t min_user_support = 5,
                                Strictness strictness = Strictness::kStrict);
FeatureMatrix build_hashtag_matrix(const UserTerms& user_hashtags, std::size_t min_user_support = 2,
                                   Strictness strictness = Strictness::kStrict);

struct MatrixTables {
  std::string triplets;    // row, column, value
  std::string vocabulary;  // column, term, user_count, idf
  std::string rows;        // row, user_id
};

MatrixTables matrix_tables(const FeatureMatrix& matrix);

// Writes "<stem>.triplets.tsv" (row, column, value), "<stem>.vocab.tsv" and
// "<stem>.rows.tsv". Returns the written paths.
std::vector<std::filesystem::path> export_matrix(const FeatureMatrix& matrix,
                                                 const std::filesystem::path& stem);

struct PartyTerms {
  std::set<std::string> keywords;
  std::set<std::string> hashtags;
  std::set<std::string> seed_accounts;
};

class PartyLexicon {
 public:
  // Party names, leaders and prominent campaign hashtags.
  static PartyLexicon defaults();
  // JSON object: {"AAP": {"keywords": [...], "hashtags": [...], "seed_accounts": [...]}, ...}
  static PartyLexicon load(const std::filesystem::path& path);
  static PartyLexicon from_json_text(const std::string& text);

  // Entries are lowercased and stripped of '#'/'@'. Throws ConfigError if
  // a seed account is claimed by two parties.
  PartyLexicon(std::map<Label, PartyTerms> parties);

  const PartyTerms& terms(Label party) const;
  // seed account -> party
  std::map<std::string, Label> seed_owners() const;
  std::string to_json() const;

 private:
  std::map<Label, PartyTerms> parties_;
};

inline constexpr std::size_t kUserFeatureCount = 11;

struct UserFeatureVector {
  double friends_count = 0;
  double followers_count = 0;
  double following_aap = 0;
  double following_bjp = 0;
  double following_cong = 0;
  double aap_words = 0;
  double bjp_words = 0;
  double cong_words = 0;
  double aap_hashtags = 0;
  double bjp_hashtags = 0;
  double cong_hashtags = 0;

  std::array<double, kUserFeatureCount> values() const;
  static const std::array<const char*, kUserFeatureCount>& names();
  bool operator==(const UserFeatureVector&) const = default;
};

UserFeatureVector user_feature_vector(const UserProfile& profile, const std::vector<Tweet>& tweets,
                                      const PartyLexicon& lexicon,
                                      const Stoplist& stoplist = Stoplist::defaults());

}  // namespace polorient
