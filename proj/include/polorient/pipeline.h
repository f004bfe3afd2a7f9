#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polorient/annotation.h"
#include "polorient/classifier.h"
#include "polorient/graph.h"
#include "polorient/report.h"

namespace polorient {

inline constexpr const char* kVersion = "1.0.0";

enum class Method { kText, kHashtag, kUserFeatures, kNetwork };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path annotations;
  std::optional<std::filesystem::path> lexicon;   // built-in lexicon when empty
  std::optional<std::filesystem::path> stoplist;  // added to the defaults
  Method method = Method::kText;
  Dimension dimension = Dimension::kPro;
  ForestParams forest;  // rng_seed and threads are set by run()
  CvMode cv_mode = CvMode::kKFold;
  std::size_t cv_k = 10;
  bool balance = false;
  std::optional<std::size_t> min_user_support;  // 5 for text, 2 for hashtags
  double min_size_fraction = 0.0005;
  double resolution = 1.0;
  EdgeWeighting weighting = EdgeWeighting::kUnweighted;
  bool analytics = true;
  std::uint64_t seed = 1;
  int tz_offset = 5 * 3600 + 30 * 60;
  bool strict = false;  // malformed records are skipped unless set
  std::vector<ReportFormat> formats = {ReportFormat::kTable, ReportFormat::kStructured};
  std::filesystem::path output_dir = "out";
  // Directory that relative input paths resolve against; not part of the hash.
  std::filesystem::path base_dir = ".";

  std::filesystem::path resolve(const std::filesystem::path& p) const;

  // Relative paths in the file resolve against `base_dir`. Unknown keys are
  // rejected.
  static RunConfig from_json_text(const std::string& text, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  // Canonical JSON of every setting that affects results, with sorted keys.
  // The output directory is excluded so a run can be relocated.
  std::string canonical_json() const;
  // Lowercase hex SHA-256 of canonical_json().
  std::string hash() const;

  void validate() const;
};

// Seeds for each randomized stage, derived from RunConfig::seed.
struct StageSeeds {
  std::uint64_t forest = 0;
  std::uint64_t cv = 0;
  std::uint64_t balance = 0;
  std::uint64_t louvain = 0;
};
StageSeeds stage_seeds(std::uint64_t seed);

struct RunResult {
  RunSummary summary;
  std::vector<std::filesystem::path> files;  // final locations, manifest last
};

// Runs ingest, annotate, featurize/graph, classify, analyze and report.
// Failures are rethrown with their kind preserved and the stage named; no
// output of the failed run is left behind.
RunResult run(const RunConfig& config);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

}  // namespace polorient
