#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polorient/classifier.h"

namespace polorient {

struct NetworkSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double modularity = 0.0;
  std::size_t communities = 0;
  std::size_t labeled_communities = 0;
  double min_size_fraction = 0.0;
  std::size_t truth_users = 0;
  std::size_t absent_users = 0;
  std::size_t unlabeled_users = 0;
  double coverage = 0.0;
};

struct RunSummary {
  std::string method;
  std::string dimension;
  std::size_t instances = 0;
  std::optional<std::size_t> attributes;  // feature-based methods only
  std::string classifier;
  std::optional<NetworkSummary> network;
  EvalReport eval;
  std::string config_hash;
  std::uint64_t seed = 0;
};

enum class ReportFormat { kTable, kStructured };

ReportFormat parse_report_format(std::string_view text);

// Result-table layout: header lines, "Efficiency: xx.xx%", then one
// precision/recall/F row per class to 3 decimals.
std::string format_table(const RunSummary& summary);
// JSON with the same fields.
std::string format_structured(const RunSummary& summary);

// Writes report.txt and/or report.json into `dir`. Throws ConfigError if the
// directory cannot be written.
std::vector<std::filesystem::path> emit_report(const RunSummary& summary,
                                               const std::filesystem::path& dir,
                                               const std::vector<ReportFormat>& formats);

// Writes `content` to `path`, replacing it. Throws ConfigError on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace polorient
