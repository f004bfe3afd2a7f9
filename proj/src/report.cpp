#include "polorient/report.h"

#include <cstdio>
#include <fstream>
#include "json.hpp"

#include "polorient/errors.h"

namespace polorient {
namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) text.append(width - text.size(), ' ');
  return text;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "table") return ReportFormat::kTable;
  if (text == "structured") return ReportFormat::kStructured;
  throw ConfigError("report format must be table or structured; got '" + std::string(text) + "'");
}

std::string format_table(const RunSummary& s) {
  std::string out;
  out += "Method: " + s.method + " (" + s.dimension + ")\n";
  if (s.network) {
    const auto& n = *s.network;
    out += "#Nodes: " + std::to_string(n.nodes) + "\n";
    out += "#Edges: " + std::to_string(n.edges) + "\n";
    out += "Modularity Score: " + fixed(n.modularity, 3) + "\n";
    out += "Communities: " + std::to_string(n.communities) + " (" +
           std::to_string(n.labeled_communities) + " labeled)\n";
    out += "Coverage: " + std::to_string(s.instances) + " of " + std::to_string(n.truth_users) +
           " users (" + fixed(100.0 * n.coverage, 2) + "%), " + std::to_string(n.absent_users) +
           " absent, " + std::to_string(n.unlabeled_users) + " unlabeled\n";
  }
  out += "Instances: " + std::to_string(s.instances) + "\n";
  if (s.attributes) out += "Attributes: " + std::to_string(*s.attributes) + "\n";
  out += "Classifier: " + s.classifier + "\n";
  out += "Efficiency: " + fixed(100.0 * s.eval.accuracy, 2) + "%\n";
  out += pad("Party", 10) + pad("Precision", 11) + pad("Recall", 11) + "F-measure\n";
  for (std::size_t c = 0; c < s.eval.classes.size(); ++c) {
    const auto& m = s.eval.per_class[c];
    out += pad(s.eval.classes[c], 10) + pad(fixed(m.precision, 3), 11) + pad(fixed(m.recall, 3), 11) +
           fixed(m.f_measure, 3) + "\n";
  }
  out += "Confusion (rows true, columns predicted):\n";
  for (std::size_t r = 0; r < s.eval.confusion.size(); ++r) {
    std::string line = pad(s.eval.classes[r], 10);
    for (auto cell : s.eval.confusion[r]) line += pad(std::to_string(cell), 7);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += "Evaluation: " + s.eval.protocol + "\n";
  out += "Seed: " + std::to_string(s.seed) + "\n";
  out += "Config SHA-256: " + s.config_hash + "\n";
  return out;
}

std::string format_structured(const RunSummary& s) {
  nlohmann::ordered_json doc;
  doc["format"] = "polorient-report";
  doc["version"] = 1;
  doc["config_sha256"] = s.config_hash;
  doc["seed"] = s.seed;
  doc["method"] = s.method;
  doc["dimension"] = s.dimension;
  doc["instances"] = s.instances;
  doc["attributes"] = s.attributes ? nlohmann::ordered_json(*s.attributes) : nlohmann::ordered_json();
  doc["classifier"] = s.classifier;
  doc["protocol"] = s.eval.protocol;
  doc["efficiency"] = s.eval.accuracy;
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < s.eval.classes.size(); ++c) {
    const auto& m = s.eval.per_class[c];
    classes.push_back({{"party", s.eval.classes[c]},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f_measure", m.f_measure}});
  }
  doc["classes"] = classes;
  doc["confusion"] = s.eval.confusion;
  if (s.network) {
    const auto& n = *s.network;
    doc["network"] = {{"nodes", n.nodes},
                      {"edges", n.edges},
                      {"modularity", n.modularity},
                      {"communities", n.communities},
                      {"labeled_communities", n.labeled_communities},
                      {"min_size_fraction", n.min_size_fraction},
                      {"truth_users", n.truth_users},
                      {"absent_users", n.absent_users},
                      {"unlabeled_users", n.unlabeled_users},
                      {"coverage", n.coverage}};
  } else {
    doc["network"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::vector<std::filesystem::path> emit_report(const RunSummary& summary,
                                               const std::filesystem::path& dir,
                                               const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (auto format : formats) {
    if (format == ReportFormat::kTable) {
      written.push_back(dir / "report.txt");
      write_file(written.back(), format_table(summary));
    } else {
      written.push_back(dir / "report.json");
      write_file(written.back(), format_structured(summary));
    }
  }
  return written;
}

}  // namespace polorient
