#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polorient/annotation.h"
#include "polorient/corpus.h"
#include "polorient/features.h"
#include "polorient/labels.h"

namespace polorient {

// Planted-truth corpus generator for tests and demos.
struct SyntheticSpec {
  std::map<Label, std::size_t> users_per_party = {
      {Label::kAap, 60}, {Label::kBjp, 60}, {Label::kCong, 60}};
  std::size_t tweets_per_user = 12;
  // Per tweet: probability of retweeting or mentioning a same-party account,
  // and of doing so with another party's account.
  double p_intra = 0.3;
  double p_cross = 0.02;
  // Per token: probability of drawing from the author's party vocabulary.
  // Half as often again a token comes from a rival party's vocabulary.
  std::map<Label, double> vocab_skew = {
      {Label::kAap, 0.05}, {Label::kBjp, 0.05}, {Label::kCong, 0.05}};
  // Per annotator and dimension: probability of a uniformly random label.
  double annotator_noise = 0.15;
  std::uint64_t rng_seed = 1;
  Timestamp start = 1393632000;  // 2014-03-01T00:00:00Z
  std::int64_t days = 75;

  static SyntheticSpec defaults() { return {}; }
  // BJP-heavy class sizes 133 / 447 / 33.
  static SyntheticSpec bjp_heavy();
  static SyntheticSpec preset(std::string_view name);  // "default" or "bjp-heavy"
  static SyntheticSpec from_json_text(const std::string& text);
  std::string to_json() const;

  // Throws ConfigError when a probability leaves [0, 1] or a count is 0.
  void validate() const;
};

struct SyntheticCorpus {
  std::vector<Tweet> tweets;  // ordered by time
  std::vector<UserProfile> profiles;
  std::vector<Annotation> annotations;  // 3 annotators per ordinary user
  PartyLexicon lexicon = PartyLexicon::defaults();
  std::map<std::string, Label> planted_pro;   // user_id -> party
  std::map<std::string, Label> planted_anti;  // user_id -> label
};

// Ordinary users plus each party's seed accounts from the default lexicon.
// A pure function of the spec.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// corpus.jsonl, annotations.csv, lexicon.json, truth.csv, synth_spec.json.
std::vector<std::filesystem::path> write_synthetic(const SyntheticCorpus& corpus,
                                                   const SyntheticSpec& spec,
                                                   const std::filesystem::path& dir);

}  // namespace polorient
