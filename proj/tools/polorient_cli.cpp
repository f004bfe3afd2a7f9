// polorient: political-orientation experiments over a tweet corpus.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polorient/analytics.h"
#include "polorient/annotation.h"
#include "polorient/corpus.h"
#include "polorient/errors.h"
#include "polorient/features.h"
#include "polorient/graph.h"
#include "polorient/pipeline.h"
#include "polorient/report.h"
#include "polorient/synthetic.h"

namespace fs = std::filesystem;
using namespace polorient;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tz;
  std::optional<std::string> out;
  bool strict = false;
};

Strictness strictness(const Globals& g) { return g.strict ? Strictness::kStrict : Strictness::kSkipMalformed; }

int tz_of(const Globals& g) {
  if (!g.tz) return kDefaultTzOffset;
  try {
    return parse_tz_offset(*g.tz);
  } catch (const DataError& e) {
    throw ConfigError(std::string("--tz: ") + e.what());
  }
}

fs::path out_dir(const Globals& g, const char* fallback) { return g.out ? fs::path(*g.out) : fs::path(fallback); }

// Config file plus command-line overrides.
RunConfig load_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required for this command");
  RunConfig config = RunConfig::load(g.config);
  if (g.seed) config.seed = *g.seed;
  if (g.tz) config.tz_offset = tz_of(g);
  if (g.out) config.output_dir = fs::absolute(*g.out);
  if (g.strict) config.strict = true;
  return config;
}

int print_run(const RunConfig& config) {
  const auto result = run(config);
  std::cout << format_table(result.summary);
  std::cerr << "wrote " << result.files.size() << " files to " << config.output_dir.string() << "\n";
  return 0;
}

void cmd_ingest(const Globals& g, const std::string& corpus_path) {
  const auto corpus = parse_corpus(corpus_path, strictness(g));
  std::cout << "tweets: " << corpus.tweets.size() << "\nprofiles: " << corpus.profiles.size()
            << "\nskipped: " << corpus.skipped_count << "\n";
  if (g.out) {
    std::string jsonl;
    for (const auto& p : corpus.profiles) jsonl += serialize_profile(p) + "\n";
    for (const auto& t : corpus.tweets) jsonl += serialize_tweet(t) + "\n";
    fs::create_directories(*g.out);
    write_file(fs::path(*g.out) / "corpus.normalized.jsonl", jsonl);
  }
}

void cmd_agree(const Globals& g, const std::string& path, std::optional<double> pr_a, std::optional<double> pr_e) {
  if (pr_a || pr_e) {
    if (!pr_a || !pr_e) throw ConfigError("--pr-a and --pr-e go together");
    std::printf("kappa %.4f\n", kappa_from(*pr_a, *pr_e));
    return;
  }
  if (path.empty()) throw ConfigError("--annotations is required");
  const auto annotations = load_annotations(path);
  for (Dimension dim : {Dimension::kPro, Dimension::kAnti}) {
    std::printf("%s\n", std::string(to_string(dim)).c_str());
    for (const auto& [pair, s] : pairwise_agreement(annotations, dim)) {
      std::printf("  %s-%s  pr_a %.4f  pr_e %.4f  kappa %.4f  n %zu\n", pair.first.c_str(),
                  pair.second.c_str(), s.pr_a, s.pr_e, s.kappa, s.n_items);
    }
    std::printf("  mean kappa %.4f\n", mean_pairwise_kappa(annotations, dim));
  }
  const auto resolved = resolve_majority(annotations);
  if (g.out) {
    std::string csv = "user_id,pro,anti\n";
    for (const auto& u : resolved) {
      csv += u.user_id + "," + std::string(to_string(u.pro)) + "," + std::string(to_string(u.anti)) + "\n";
    }
    fs::create_directories(*g.out);
    write_file(fs::path(*g.out) / "resolved.csv", csv);
  }
}

void cmd_analyze(const Globals& g, const std::string& corpus_path, const std::string& granularity,
                 const std::string& lexicon_path) {
  const auto corpus = parse_corpus(corpus_path, strictness(g));
  const int tz = tz_of(g);
  const auto gran = parse_granularity(granularity);
  const auto lexicon = lexicon_path.empty() ? PartyLexicon::defaults() : PartyLexicon::load(lexicon_path);
  const auto volume = volume_series(corpus.tweets, gran, tz);
  const auto users = unique_user_stats(corpus.tweets, std::nullopt, 10, tz);
  std::printf("tweets %lld, users %zu, %s buckets %zu, mean %.3f, stddev %.3f\n",
              static_cast<long long>(users.tweet_count), users.unique_users,
              std::string(to_string(gran)).c_str(), volume.series.points.size(), volume.mean, volume.stddev);
  const fs::path dir = out_dir(g, "analytics");
  fs::create_directories(dir);
  const std::string suffix = std::string(to_string(gran)) + ".csv";
  write_file(dir / ("volume_" + suffix), series_csv(volume.series, "tweets"));
  write_file(dir / "day_hour.csv", day_hour_csv(day_hour_matrix(corpus.tweets, tz)));
  write_file(dir / ("party_mentions_" + suffix), party_series_csv(party_mentions(corpus.tweets, lexicon, gran, tz)));
  write_file(dir / ("top_hashtags_" + suffix), top_hashtags_csv(top_hashtags(corpus.tweets, gran, 5, tz), tz));
  write_file(dir / "top_users.csv", ranked_csv(users.top, "screen_name"));
}

void cmd_synth(const Globals& g, const std::string& preset, const std::string& spec_path) {
  SyntheticSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw ConfigError("cannot read " + spec_path);
    std::stringstream buf;
    buf << in.rdbuf();
    spec = SyntheticSpec::from_json_text(buf.str());
  } else {
    spec = SyntheticSpec::preset(preset);
  }
  if (g.seed) spec.rng_seed = *g.seed;
  const fs::path dir = out_dir(g, "synthetic");
  const auto corpus = generate_synthetic(spec);
  auto files = write_synthetic(corpus, spec, dir);
  // Ready-to-run configs, one per method.
  for (const char* method : {"text", "hashtag", "user-features", "network"}) {
    nlohmann::ordered_json c;
    c["corpus"] = "corpus.jsonl";
    c["annotations"] = "annotations.csv";
    c["lexicon"] = "lexicon.json";
    c["method"] = method;
    c["seed"] = spec.rng_seed;
    c["output_dir"] = std::string("run-") + method;
    files.push_back(dir / (std::string("config-") + method + ".json"));
    write_file(files.back(), c.dump(2) + "\n");
  }
  std::printf("%zu tweets, %zu profiles, %zu annotations\n", corpus.tweets.size(), corpus.profiles.size(),
              corpus.annotations.size());
  for (const auto& f : files) std::printf("  %s\n", f.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Political-orientation classification of tweet authors"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Override the random seed");
  app.add_option("--tz", g.tz, "Local time offset, e.g. +05:30");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--strict", g.strict, "Fail on malformed records instead of skipping them");

  std::string corpus_path;
  std::string annotations_path;
  std::string lexicon_path;
  std::string method;
  std::string granularity = "day";
  std::string preset = "default";
  std::string spec_path;
  std::optional<double> pr_a;
  std::optional<double> pr_e;

  auto* ingest = app.add_subcommand("ingest", "Parse and validate a JSONL corpus");
  ingest->add_option("--corpus", corpus_path, "Corpus file")->required();

  auto* agree = app.add_subcommand("agree", "Inter-annotator agreement and majority labels");
  agree->add_option("--annotations", annotations_path, "Annotation table");
  agree->add_option("--pr-a", pr_a, "Observed agreement, for a direct kappa computation");
  agree->add_option("--pr-e", pr_e, "Chance agreement, for a direct kappa computation");

  auto* featurize = app.add_subcommand("featurize", "Run a config through feature extraction and evaluation");
  featurize->add_option("--method", method, "text, hashtag or user-features");
  auto* classify = app.add_subcommand("classify", "Cross-validate a random forest on a config's features");
  classify->add_option("--method", method, "text, hashtag or user-features");
  auto* graph = app.add_subcommand("graph", "Community-based classification on the interaction graph");

  auto* analyze = app.add_subcommand("analyze", "Time series, activity and hashtag statistics");
  analyze->add_option("--corpus", corpus_path, "Corpus file")->required();
  analyze->add_option("--granularity", granularity, "hour, day, week or month");
  analyze->add_option("--lexicon", lexicon_path, "Party lexicon (JSON)");

  auto* synth = app.add_subcommand("synth", "Generate a planted-truth synthetic corpus");
  synth->add_option("--preset", preset, "default or bjp-heavy");
  synth->add_option("--spec", spec_path, "Synthetic spec (JSON)");

  auto* report = app.add_subcommand("report", "Run a config end to end and emit its reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kConfig);
  }

  try {
    if (ingest->parsed()) {
      cmd_ingest(g, corpus_path);
    } else if (agree->parsed()) {
      cmd_agree(g, annotations_path, pr_a, pr_e);
    } else if (featurize->parsed() || classify->parsed()) {
      auto config = load_config(g);
      if (!method.empty()) config.method = parse_method(method);
      if (config.method == Method::kNetwork) throw ConfigError("use the graph command for the network method");
      return print_run(config);
    } else if (graph->parsed()) {
      auto config = load_config(g);
      config.method = Method::kNetwork;
      return print_run(config);
    } else if (analyze->parsed()) {
      cmd_analyze(g, corpus_path, granularity, lexicon_path);
    } else if (synth->parsed()) {
      cmd_synth(g, preset, spec_path);
    } else if (report->parsed()) {
      return print_run(load_config(g));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kInternal);
  }
  return 0;
}
