#include "polorient/pipeline.h"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include "json.hpp"
#include <set>
#include <sstream>

#include "polorient/analytics.h"
#include "polorient/corpus.h"
#include "polorient/errors.h"
#include "polorient/features.h"
#include "polorient/rng.h"

namespace polorient {
namespace {

using Json = nlohmann::json;

const std::set<std::string> kConfigKeys = {
    "corpus", "annotations", "lexicon",  "stoplist", "method", "dimension", "classifier",
    "cv",     "balance",     "min_user_support",    "graph",  "analytics", "seed",
    "tz",     "strict",      "formats",  "output_dir"};

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("config: unknown key '" + where + key + "'");
  }
}

std::size_t positive(const Json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw ConfigError("config: " + what + " must be an integer >= 1");
  }
  return v.get<std::size_t>();
}

std::string text_of(const Json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError("config: " + what + " must be a string");
  return v.get<std::string>();
}

bool flag(const Json& v, const std::string& what) {
  if (!v.is_boolean()) throw ConfigError("config: " + what + " must be true or false");
  return v.get<bool>();
}

double number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError("config: " + what + " must be a number");
  return v.get<double>();
}

std::string read_file(const std::filesystem::path& path, ErrorKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(kind, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hash_header(const std::string& hash) { return "# config_sha256 " + hash + "\n"; }

// Files are written to a hidden staging directory and moved into place only
// after every stage has succeeded.
class Staging {
 public:
  explicit Staging(std::filesystem::path final_dir, const std::string& tag) : final_dir_(std::move(final_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(final_dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + final_dir_.string() + ": " + ec.message());
    dir_ = final_dir_ / (".partial-" + tag);
    std::filesystem::remove_all(dir_, ec);
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create " + dir_.string() + ": " + ec.message());
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }

  void add(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    names_.push_back(name);
  }

  std::vector<std::filesystem::path> commit() {
    std::vector<std::filesystem::path> out;
    for (const auto& name : names_) {
      std::error_code ec;
      std::filesystem::rename(dir_ / name, final_dir_ / name, ec);
      if (ec) throw Error(ErrorKind::kInternal, "cannot move " + name + " into place: " + ec.message());
      out.push_back(final_dir_ / name);
    }
    return out;
  }

 private:
  std::filesystem::path final_dir_;
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

class StageRunner {
 public:
  template <typename F>
  auto operator()(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto record = [&] {
      const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
      timings_.emplace_back(name, ms.count());
    };
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        record();
      } else {
        auto result = body();
        record();
        return result;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "stage " + name + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kInternal, "stage " + name + ": " + e.what());
    }
  }

  const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

 private:
  std::vector<std::pair<std::string, double>> timings_;
};

std::vector<std::string> party_names() {
  std::vector<std::string> out;
  for (Label p : kParties) out.emplace_back(to_string(p));
  return out;
}

struct Inputs {
  Corpus corpus;
  PartyLexicon lexicon = PartyLexicon::defaults();
  Stoplist stoplist = Stoplist::defaults();
  std::vector<Annotation> annotations;
};

struct Dataset {
  FeatureRows rows;
  std::vector<std::string> labels;
  std::size_t attributes = 0;
};

Json agreement_json(const std::vector<Annotation>& annotations, const std::vector<LabeledUser>& resolved) {
  Json doc = Json::object();
  for (Dimension dim : {Dimension::kPro, Dimension::kAnti}) {
    Json d;
    Json pairs = Json::array();
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& [pair, stats] : pairwise_agreement(annotations, dim)) {
      pairs.push_back({{"a", pair.first}, {"b", pair.second}, {"pr_a", stats.pr_a},
                       {"pr_e", stats.pr_e}, {"kappa", stats.kappa}, {"n", stats.n_items}});
      sum += stats.kappa;
      ++defined;
    }
    d["pairs"] = pairs;
    d["mean_kappa"] = defined ? Json(sum / static_cast<double>(defined)) : Json();
    Json hist = Json::object();
    for (Label l : kAllLabels) hist[std::string(to_string(l))] = 0;
    for (const auto& u : resolved) {
      auto& cell = hist[std::string(to_string(dim == Dimension::kPro ? u.pro : u.anti))];
      cell = cell.get<int>() + 1;
    }
    d["resolved"] = hist;
    doc[std::string(to_string(dim))] = d;
  }
  return doc;
}

std::map<std::string, std::vector<const Tweet*>> tweets_by_author(const std::vector<Tweet>& tweets) {
  std::map<std::string, std::vector<const Tweet*>> out;
  for (const auto& t : tweets) out[t.author_id].push_back(&t);
  return out;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kText: return "text";
    case Method::kHashtag: return "hashtag";
    case Method::kUserFeatures: return "user-features";
    case Method::kNetwork: return "network";
  }
  return "text";
}

Method parse_method(std::string_view text) {
  if (text == "text") return Method::kText;
  if (text == "hashtag") return Method::kHashtag;
  if (text == "user-features") return Method::kUserFeatures;
  if (text == "network") return Method::kNetwork;
  throw ConfigError("method must be text, hashtag, user-features or network; got '" + std::string(text) + "'");
}

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

RunConfig RunConfig::from_json_text(const std::string& text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(doc, kConfigKeys, "");

  RunConfig c;
  c.base_dir = base_dir;
  if (!doc.contains("corpus")) throw ConfigError("config: 'corpus' is required");
  if (!doc.contains("annotations")) throw ConfigError("config: 'annotations' is required");
  c.corpus = text_of(doc["corpus"], "corpus");
  c.annotations = text_of(doc["annotations"], "annotations");
  if (doc.contains("lexicon") && !doc["lexicon"].is_null()) c.lexicon = text_of(doc["lexicon"], "lexicon");
  if (doc.contains("stoplist") && !doc["stoplist"].is_null()) c.stoplist = text_of(doc["stoplist"], "stoplist");
  if (doc.contains("method")) c.method = parse_method(text_of(doc["method"], "method"));
  if (doc.contains("dimension")) c.dimension = parse_dimension(text_of(doc["dimension"], "dimension"));
  if (doc.contains("classifier")) {
    const auto& k = doc["classifier"];
    if (!k.is_object()) throw ConfigError("config: classifier must be an object");
    check_keys(k, {"n_trees", "max_depth", "features_per_split", "min_leaf", "threads"}, "classifier.");
    if (k.contains("n_trees")) c.forest.n_trees = positive(k["n_trees"], "classifier.n_trees");
    if (k.contains("max_depth") && !k["max_depth"].is_null()) {
      c.forest.max_depth = positive(k["max_depth"], "classifier.max_depth");
    }
    if (k.contains("features_per_split") && !k["features_per_split"].is_null()) {
      c.forest.features_per_split = positive(k["features_per_split"], "classifier.features_per_split");
    }
    if (k.contains("min_leaf")) c.forest.min_leaf = positive(k["min_leaf"], "classifier.min_leaf");
    if (k.contains("threads")) {
      if (!k["threads"].is_number_unsigned()) throw ConfigError("config: classifier.threads must be >= 0");
      c.forest.threads = k["threads"].get<std::size_t>();
    }
  }
  if (doc.contains("cv")) {
    const auto& cv = doc["cv"];
    if (!cv.is_object()) throw ConfigError("config: cv must be an object");
    check_keys(cv, {"mode", "k"}, "cv.");
    if (cv.contains("mode")) {
      const auto mode = text_of(cv["mode"], "cv.mode");
      if (mode == "kfold") {
        c.cv_mode = CvMode::kKFold;
      } else if (mode == "holdout") {
        c.cv_mode = CvMode::kRepeatedHoldout;
      } else {
        throw ConfigError("config: cv.mode must be kfold or holdout");
      }
    }
    if (cv.contains("k")) c.cv_k = positive(cv["k"], "cv.k");
  }
  if (doc.contains("balance")) c.balance = flag(doc["balance"], "balance");
  if (doc.contains("min_user_support") && !doc["min_user_support"].is_null()) {
    c.min_user_support = positive(doc["min_user_support"], "min_user_support");
  }
  if (doc.contains("graph")) {
    const auto& g = doc["graph"];
    if (!g.is_object()) throw ConfigError("config: graph must be an object");
    check_keys(g, {"min_size_fraction", "resolution", "weighting"}, "graph.");
    if (g.contains("min_size_fraction")) c.min_size_fraction = number(g["min_size_fraction"], "graph.min_size_fraction");
    if (g.contains("resolution")) c.resolution = number(g["resolution"], "graph.resolution");
    if (g.contains("weighting")) {
      const auto w = text_of(g["weighting"], "graph.weighting");
      if (w == "unweighted") {
        c.weighting = EdgeWeighting::kUnweighted;
      } else if (w == "count") {
        c.weighting = EdgeWeighting::kInteractionCount;
      } else {
        throw ConfigError("config: graph.weighting must be unweighted or count");
      }
    }
  }
  if (doc.contains("analytics")) c.analytics = flag(doc["analytics"], "analytics");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("config: seed must be a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tz")) {
    try {
      c.tz_offset = parse_tz_offset(text_of(doc["tz"], "tz"));
    } catch (const DataError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (doc.contains("strict")) c.strict = flag(doc["strict"], "strict");
  if (doc.contains("formats")) {
    if (!doc["formats"].is_array() || doc["formats"].empty()) {
      throw ConfigError("config: formats must be a nonempty array");
    }
    c.formats.clear();
    for (const auto& f : doc["formats"]) c.formats.push_back(parse_report_format(text_of(f, "formats[]")));
  }
  if (doc.contains("output_dir")) c.output_dir = base_dir / text_of(doc["output_dir"], "output_dir");
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const auto text = read_file(path, ErrorKind::kConfig);
  return from_json_text(text, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void RunConfig::validate() const {
  if (cv_k < 2) throw ConfigError("config: cv.k must be at least 2");
  if (!(min_size_fraction >= 0.0 && min_size_fraction <= 1.0)) {
    throw ConfigError("config: graph.min_size_fraction must be in [0, 1]");
  }
  if (!(resolution > 0.0)) throw ConfigError("config: graph.resolution must be positive");
  if (formats.empty()) throw ConfigError("config: at least one report format is required");
}

std::string RunConfig::canonical_json() const {
  Json doc;
  doc["corpus"] = corpus.generic_string();
  doc["annotations"] = annotations.generic_string();
  doc["lexicon"] = lexicon ? Json(lexicon->generic_string()) : Json();
  doc["stoplist"] = stoplist ? Json(stoplist->generic_string()) : Json();
  doc["method"] = std::string(to_string(method));
  doc["dimension"] = std::string(to_string(dimension));
  doc["classifier"] = {
      {"n_trees", forest.n_trees},
      {"max_depth", forest.max_depth ? Json(*forest.max_depth) : Json()},
      {"features_per_split", forest.features_per_split ? Json(*forest.features_per_split) : Json()},
      {"min_leaf", forest.min_leaf}};
  doc["cv"] = {{"mode", cv_mode == CvMode::kKFold ? "kfold" : "holdout"}, {"k", cv_k}};
  doc["balance"] = balance;
  doc["min_user_support"] = min_user_support ? Json(*min_user_support) : Json();
  doc["graph"] = {{"min_size_fraction", min_size_fraction},
                  {"resolution", resolution},
                  {"weighting", weighting == EdgeWeighting::kUnweighted ? "unweighted" : "count"}};
  doc["analytics"] = analytics;
  doc["seed"] = seed;
  doc["tz"] = format_tz_offset(tz_offset);
  doc["strict"] = strict;
  Json formats_json = Json::array();
  for (auto f : formats) formats_json.push_back(f == ReportFormat::kTable ? "table" : "structured");
  doc["formats"] = formats_json;
  return doc.dump();
}

std::string RunConfig::hash() const { return sha256_hex(canonical_json()); }

StageSeeds stage_seeds(std::uint64_t seed) {
  return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3), derive_seed(seed, 4)};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kInternal, "SHA-256 computation failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    out += buf;
  }
  return out;
}

std::string file_sha256(const std::filesystem::path& path) {
  return sha256_hex(read_file(path, ErrorKind::kData));
}

RunResult run(const RunConfig& config) {
  config.validate();
  const std::string hash = config.hash();
  const StageSeeds seeds = stage_seeds(config.seed);
  const Strictness strictness = config.strict ? Strictness::kStrict : Strictness::kSkipMalformed;
  const std::vector<std::string> parties = party_names();

  StageRunner stage;
  Staging out(config.output_dir, hash.substr(0, 12));
  RunSummary summary;
  summary.method = std::string(to_string(config.method));
  summary.dimension = std::string(to_string(config.dimension));
  summary.config_hash = hash;
  summary.seed = config.seed;

  Json inputs;
  Inputs in = stage("ingest", [&] {
    Inputs loaded;
    for (const auto& [name, path] : {std::pair<const char*, std::filesystem::path>{"corpus", config.corpus},
                                     {"annotations", config.annotations}}) {
      if (!std::filesystem::exists(config.resolve(path))) {
        throw ConfigError(std::string(name) + " file not found: " + config.resolve(path).string());
      }
    }
    loaded.corpus = parse_corpus(config.resolve(config.corpus), strictness);
    inputs["corpus"] = {{"path", config.corpus.generic_string()}, {"sha256", file_sha256(config.resolve(config.corpus))},
                        {"tweets", loaded.corpus.tweets.size()}, {"profiles", loaded.corpus.profiles.size()},
                        {"skipped", loaded.corpus.skipped_count}};
    if (config.lexicon) {
      loaded.lexicon = PartyLexicon::load(config.resolve(*config.lexicon));
      inputs["lexicon"] = {{"path", config.lexicon->generic_string()},
                           {"sha256", file_sha256(config.resolve(*config.lexicon))}};
    }
    if (config.stoplist) {
      loaded.stoplist = Stoplist::load(config.resolve(*config.stoplist));
      inputs["stoplist"] = {{"path", config.stoplist->generic_string()},
                            {"sha256", file_sha256(config.resolve(*config.stoplist))}};
    }
    loaded.annotations = load_annotations(config.resolve(config.annotations));
    inputs["annotations"] = {{"path", config.annotations.generic_string()},
                             {"sha256", file_sha256(config.resolve(config.annotations))},
                             {"rows", loaded.annotations.size()}};
    return loaded;
  });

  const LabelMap truth = stage("annotate", [&] {
    const auto resolved = resolve_majority(in.annotations);
    Json agreement;
    try {
      agreement = agreement_json(in.annotations, resolved);
    } catch (const DataError& e) {
      if (config.strict) throw;
      agreement = {{"error", e.what()}};
    }
    agreement["config_sha256"] = hash;
    out.add("agreement.json", agreement.dump(2) + "\n");
    return decided_labels(resolved, config.dimension);
  });
  if (truth.empty()) {
    throw DataError("stage annotate: no user has a decided " + summary.dimension + " label");
  }

  const auto by_author = tweets_by_author(in.corpus.tweets);
  auto user_tweets = [&](const std::string& user_id) {
    std::vector<Tweet> tweets;
    auto it = by_author.find(user_id);
    if (it != by_author.end()) {
      for (const Tweet* t : it->second) tweets.push_back(*t);
    }
    return tweets;
  };

  if (config.method == Method::kNetwork) {
    stage("graph", [&] {
      const auto graph = build_interaction_graph(in.corpus.tweets, config.weighting);
      const auto partition = louvain(graph, {seeds.louvain, config.resolution});
      const auto labeling = label_communities(partition, in.lexicon.seed_owners(), config.min_size_fraction);

      // Truth is keyed by user_id; graph nodes are screen names.
      std::map<std::string, std::string> screen_of;
      for (const auto& t : in.corpus.tweets) screen_of.emplace(t.author_id, t.author_screen_name);
      for (const auto& p : in.corpus.profiles) screen_of[p.user_id] = p.screen_name;
      std::map<std::string, Label> by_screen;
      std::size_t unnamed = 0;
      for (const auto& [user, party] : truth) {
        auto it = screen_of.find(user);
        if (it == screen_of.end()) {
          ++unnamed;
        } else {
          by_screen[it->second] = party;
        }
      }
      auto eval = community_classify(partition, labeling, by_screen);

      NetworkSummary net;
      net.nodes = graph.node_count();
      net.edges = graph.edge_count();
      net.modularity = partition.modularity_q;
      net.communities = partition.community_count;
      for (const auto& l : labeling.labels) net.labeled_communities += l.has_value();
      net.min_size_fraction = labeling.min_size_fraction;
      net.truth_users = eval.truth_users + unnamed;
      net.absent_users = eval.absent_users + unnamed;
      net.unlabeled_users = eval.unlabeled_users;
      net.coverage = static_cast<double>(eval.evaluated_users) / static_cast<double>(net.truth_users);
      summary.network = net;
      summary.instances = eval.evaluated_users;
      summary.classifier = "Louvain community detection, communities labeled by seed-account plurality";
      summary.eval = eval.report;

      out.add("edges.txt", hash_header(hash) + edge_list_text(graph));
      out.add("partition.txt", hash_header(hash) + partition_text(partition));
      std::string communities = hash_header(hash) + "community\tsize\tlabel\n";
      const auto sizes = partition.community_sizes();
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        communities += std::to_string(c) + "\t" + std::to_string(sizes[c]) + "\t" +
                       (labeling.labels[c] ? std::string(to_string(*labeling.labels[c])) : "UNLABELED") + "\n";
      }
      out.add("communities.tsv", communities);
    });
  } else {
    Dataset data = stage("featurize", [&] {
      Dataset d;
      std::vector<std::string> users;
      if (config.method == Method::kUserFeatures) {
        std::map<std::string, const UserProfile*> profiles;
        for (const auto& p : in.corpus.profiles) profiles.emplace(p.user_id, &p);
        std::string table = hash_header(hash) + "user_id";
        for (const char* name : UserFeatureVector::names()) table += std::string("\t") + name;
        table += "\tlabel\n";
        for (const auto& [user, party] : truth) {
          auto it = profiles.find(user);
          if (it == profiles.end()) {
            if (config.strict) throw DataError("no profile for annotated user " + user);
            continue;
          }
          const auto values = user_feature_vector(*it->second, user_tweets(user), in.lexicon, in.stoplist).values();
          d.rows.emplace_back(values.begin(), values.end());
          d.labels.emplace_back(to_string(party));
          table += user;
          for (double v : values) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "\t%.17g", v);
            table += buf;
          }
          table += "\t" + d.labels.back() + "\n";
        }
        d.attributes = kUserFeatureCount;
        out.add("features.tsv", table);
      } else {
        UserTerms terms;
        for (const auto& [user, party] : truth) {
          std::vector<std::string> items;
          for (const auto& t : user_tweets(user)) {
            if (config.method == Method::kText) {
              auto tokens = tokenize(t.text, in.stoplist);
              items.insert(items.end(), tokens.begin(), tokens.end());
            } else {
              items.insert(items.end(), t.hashtags.begin(), t.hashtags.end());
            }
          }
          terms.emplace_back(user, std::move(items));
        }
        const auto matrix =
            config.method == Method::kText
                ? build_text_matrix(terms, config.min_user_support.value_or(5), strictness)
                : build_hashtag_matrix(terms, config.min_user_support.value_or(2), strictness);
        d.rows = matrix.to_dense();
        for (const auto& user : matrix.user_ids) d.labels.emplace_back(to_string(truth.at(user)));
        d.attributes = matrix.columns();
        const auto tables = matrix_tables(matrix);
        out.add("matrix.triplets.tsv", hash_header(hash) + tables.triplets);
        out.add("matrix.vocab.tsv", hash_header(hash) + tables.vocabulary);
        out.add("matrix.rows.tsv", hash_header(hash) + tables.rows);
      }
      if (d.rows.empty()) throw DataError("no annotated user has features");
      if (config.balance) {
        const auto keep = balanced_indices(d.labels, seeds.balance);
        Dataset b;
        b.attributes = d.attributes;
        for (auto i : keep) {
          b.rows.push_back(std::move(d.rows[i]));
          b.labels.push_back(d.labels[i]);
        }
        return b;
      }
      return d;
    });

    stage("classify", [&] {
      ForestParams params = config.forest;
      params.rng_seed = seeds.forest;
      summary.eval = cross_validate(data.rows, data.labels, {config.cv_mode, config.cv_k, parties}, params, seeds.cv);
      summary.instances = data.rows.size();
      summary.attributes = data.attributes;
      summary.classifier = "Random Forest, " + std::to_string(params.n_trees) + " trees";
      if (config.balance) summary.classifier += ", balanced classes";

      auto model = Json::parse(train_forest(data.rows, data.labels, params).to_json());
      model["config_sha256"] = hash;
      out.add("model.json", model.dump() + "\n");
    });
  }

  if (config.analytics) {
    stage("analyze", [&] {
      const auto& tweets = in.corpus.tweets;
      const int tz = config.tz_offset;
      const auto volume = volume_series(tweets, Granularity::kDay, tz);
      out.add("volume_day.csv", hash_header(hash) + series_csv(volume.series, "tweets"));
      out.add("day_hour.csv", hash_header(hash) + day_hour_csv(day_hour_matrix(tweets, tz)));
      const auto mentions = party_mentions(tweets, in.lexicon, Granularity::kWeek, tz, in.stoplist);
      out.add("party_mentions_week.csv", hash_header(hash) + party_series_csv(mentions));
      out.add("top_hashtags_week.csv",
              hash_header(hash) + top_hashtags_csv(top_hashtags(tweets, Granularity::kWeek, 5, tz), tz));
      const auto users = unique_user_stats(tweets, std::nullopt, 10, tz);
      out.add("top_users.csv", hash_header(hash) + ranked_csv(users.top, "screen_name"));
      Json s;
      s["config_sha256"] = hash;
      s["tweets"] = users.tweet_count;
      s["unique_users"] = users.unique_users;
      s["daily_mean"] = volume.mean;
      s["daily_stddev"] = volume.stddev;
      Json totals;
      for (const auto& [party, series] : mentions) totals[std::string(to_string(party))] = series.sum();
      s["party_mention_tweets"] = totals;
      out.add("analytics.json", s.dump(2) + "\n");
    });
  }

  stage("report", [&] {
    for (auto format : config.formats) {
      if (format == ReportFormat::kTable) {
        out.add("report.txt", format_table(summary));
      } else {
        out.add("report.json", format_structured(summary));
      }
    }
  });

  Json manifest;
  manifest["config_sha256"] = hash;
  manifest["config"] = Json::parse(config.canonical_json());
  manifest["version"] = kVersion;
  manifest["seeds"] = {{"run", config.seed},
                       {"forest", seeds.forest},
                       {"cv", seeds.cv},
                       {"balance", seeds.balance},
                       {"louvain", seeds.louvain}};
  manifest["inputs"] = inputs;
  Json timings = Json::array();
  for (const auto& [name, ms] : stage.timings()) timings.push_back({{"stage", name}, {"ms", ms}});
  manifest["timings"] = timings;
  out.add("manifest.json", manifest.dump(2) + "\n");

  RunResult result;
  result.summary = std::move(summary);
  result.files = out.commit();
  return result;
}

}  // namespace polorient
