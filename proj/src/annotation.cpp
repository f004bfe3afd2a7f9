#include "polorient/annotation.h"

#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "polorient/errors.h"

namespace polorient {
namespace {

using LabelCounts = std::array<std::size_t, kAllLabels.size()>;

std::size_t index_of(Label label) { return static_cast<std::size_t>(label); }

// annotator -> (user -> label), validated for duplicate pairs.
std::map<std::string, LabelMap> by_annotator(const std::vector<Annotation>& annotations,
                                             Dimension dimension) {
  std::map<std::string, LabelMap> out;
  for (const auto& a : annotations) {
    if (!out[a.annotator_id].emplace(a.user_id, a.in(dimension)).second) {
      throw DataError("annotator " + a.annotator_id + " labeled user " + a.user_id + " twice");
    }
  }
  return out;
}

std::vector<std::string> split_row(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, delim)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

}  // namespace

std::string_view to_string(Dimension dimension) {
  return dimension == Dimension::kPro ? "pro" : "anti";
}

Dimension parse_dimension(std::string_view text) {
  if (text == "pro") return Dimension::kPro;
  if (text == "anti") return Dimension::kAnti;
  throw ConfigError("dimension must be 'pro' or 'anti', got '" + std::string(text) + "'");
}

double kappa_from(double pr_a, double pr_e) {
  if (pr_e >= 1.0) throw DegenerateAgreementError("chance agreement is 1; kappa undefined");
  return (pr_a - pr_e) / (1.0 - pr_e);
}

AgreementStats agreement_stats(const LabelMap& labels_a, const LabelMap& labels_b) {
  if (labels_a.empty() || labels_b.empty()) throw DataError("agreement over an empty user set");
  if (labels_a.size() != labels_b.size()) throw DataError("annotators cover different user sets");

  std::size_t agree = 0;
  LabelCounts marginal_a{};
  LabelCounts marginal_b{};
  auto it_b = labels_b.begin();
  for (const auto& [user, label_a] : labels_a) {
    if (it_b->first != user) throw DataError("annotators cover different user sets (" + user + ")");
    const Label label_b = it_b->second;
    ++marginal_a[index_of(label_a)];
    ++marginal_b[index_of(label_b)];
    if (label_a == label_b) ++agree;
    ++it_b;
  }

  const auto n = static_cast<double>(labels_a.size());
  AgreementStats stats;
  stats.n_items = labels_a.size();
  stats.pr_a = static_cast<double>(agree) / n;
  // Integer sum of products first, one division, so the fraction is exact
  // whenever n^2 fits in a double mantissa.
  std::size_t chance = 0;
  for (std::size_t i = 0; i < marginal_a.size(); ++i) chance += marginal_a[i] * marginal_b[i];
  if (chance == labels_a.size() * labels_a.size()) {
    throw DegenerateAgreementError("both annotators used one identical label for every user");
  }
  stats.pr_e = static_cast<double>(chance) / (n * n);
  stats.kappa = kappa_from(stats.pr_a, stats.pr_e);
  return stats;
}

std::map<std::pair<std::string, std::string>, AgreementStats> pairwise_agreement(
    const std::vector<Annotation>& annotations, Dimension dimension) {
  const auto per_annotator = by_annotator(annotations, dimension);
  if (per_annotator.size() < 2) throw DataError("kappa needs at least 2 annotators");

  std::set<std::string> users;
  for (const auto& a : annotations) users.insert(a.user_id);
  for (const auto& [annotator, labels] : per_annotator) {
    if (labels.size() != users.size()) {
      throw DataError("ragged coverage: annotator " + annotator + " labeled " +
                      std::to_string(labels.size()) + " of " + std::to_string(users.size()) +
                      " users");
    }
  }

  std::map<std::pair<std::string, std::string>, AgreementStats> out;
  for (auto a = per_annotator.begin(); a != per_annotator.end(); ++a) {
    for (auto b = std::next(a); b != per_annotator.end(); ++b) {
      out.emplace(std::pair{a->first, b->first}, agreement_stats(a->second, b->second));
    }
  }
  return out;
}

double mean_pairwise_kappa(const std::vector<Annotation>& annotations, Dimension dimension) {
  const auto pairs = pairwise_agreement(annotations, dimension);
  double sum = 0.0;
  for (const auto& [key, stats] : pairs) sum += stats.kappa;
  return sum / static_cast<double>(pairs.size());
}

std::vector<LabeledUser> resolve_majority(const std::vector<Annotation>& annotations) {
  struct Tally {
    std::set<std::string> annotators;
    LabelCounts pro{};
    LabelCounts anti{};
  };
  std::map<std::string, Tally> tallies;
  for (const auto& a : annotations) {
    auto& tally = tallies[a.user_id];
    if (!tally.annotators.insert(a.annotator_id).second) {
      throw DataError("annotator " + a.annotator_id + " labeled user " + a.user_id + " twice");
    }
    ++tally.pro[index_of(a.pro)];
    ++tally.anti[index_of(a.anti)];
  }

  auto majority = [](const LabelCounts& counts, std::size_t voters) {
    for (Label label : kAllLabels) {
      if (2 * counts[index_of(label)] > voters) return label;
    }
    return Label::kCantSay;
  };

  std::vector<LabeledUser> out;
  out.reserve(tallies.size());
  for (const auto& [user, tally] : tallies) {
    const std::size_t voters = tally.annotators.size();
    if (voters < 2) {
      throw DataError("user " + user + " has " + std::to_string(voters) +
                      " annotation(s); majority needs at least 2");
    }
    out.push_back({user, majority(tally.pro, voters), majority(tally.anti, voters)});
  }
  return out;
}

LabelMap decided_labels(const std::vector<LabeledUser>& users, Dimension dimension) {
  LabelMap out;
  for (const auto& u : users) {
    const Label label = dimension == Dimension::kPro ? u.pro : u.anti;
    if (is_party(label)) out.emplace(u.user_id, label);
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read annotations " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw DataError("annotation file is empty: " + path.string());
  const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
  const auto columns = split_row(header, delim);

  std::map<std::string, std::size_t> column_index;
  for (std::size_t i = 0; i < columns.size(); ++i) column_index[columns[i]] = i;
  for (const char* required : {"user_id", "annotator_id", "pro", "anti"}) {
    if (!column_index.contains(required)) {
      throw DataError(path.string() + ": header lacks column '" + required + "'");
    }
  }

  std::vector<Annotation> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line, delim);
    if (cells.size() != columns.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(columns.size()) + " cells");
    }
    Annotation a;
    a.user_id = cells[column_index["user_id"]];
    a.annotator_id = cells[column_index["annotator_id"]];
    if (a.user_id.empty() || a.annotator_id.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty id");
    }
    try {
      a.pro = parse_label_or_throw(cells[column_index["pro"]]);
      a.anti = parse_label_or_throw(cells[column_index["anti"]]);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(a));
  }
  return out;
}

void save_annotations(const std::filesystem::path& path, const std::vector<Annotation>& annotations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInternal, "cannot write " + path.string());
  out << "user_id,annotator_id,pro,anti\n";
  for (const auto& a : annotations) {
    out << a.user_id << ',' << a.annotator_id << ',' << to_string(a.pro) << ',' << to_string(a.anti)
        << '\n';
  }
}

}  // namespace polorient
