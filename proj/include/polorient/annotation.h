#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "polorient/labels.h"

namespace polorient {

enum class Dimension { kPro, kAnti };

std::string_view to_string(Dimension dimension);
Dimension parse_dimension(std::string_view text);

struct Annotation {
  std::string user_id;
  std::string annotator_id;
  Label pro = Label::kCantSay;
  Label anti = Label::kCantSay;

  Label in(Dimension dimension) const { return dimension == Dimension::kPro ? pro : anti; }
};

// Observed agreement, chance agreement and Cohen's kappa for one annotator pair.
struct AgreementStats {
  double pr_a = 0.0;
  double pr_e = 0.0;
  double kappa = 0.0;
  std::size_t n_items = 0;
};

struct LabeledUser {
  std::string user_id;
  Label pro = Label::kCantSay;
  Label anti = Label::kCantSay;
};

using LabelMap = std::map<std::string, Label>;

// Chance agreement is the sum over labels of the product of the two
// annotators' marginal label fractions.
//
// Throws DataError on empty input or mismatched user sets, and
// DegenerateAgreementError when chance agreement equals 1.
AgreementStats agreement_stats(const LabelMap& labels_a, const LabelMap& labels_b);

// Kappa from already-known agreement fractions.
double kappa_from(double pr_a, double pr_e);

// Arithmetic mean of per-pair kappa over all unordered annotator pairs. Every
// user must be annotated by the same set of >= 2 annotators.
double mean_pairwise_kappa(const std::vector<Annotation>& annotations, Dimension dimension);

// Per-pair stats keyed by (annotator_a, annotator_b), a < b.
std::map<std::pair<std::string, std::string>, AgreementStats> pairwise_agreement(
    const std::vector<Annotation>& annotations, Dimension dimension);

// A user's label in each dimension is L iff strictly more than half of that
// user's annotators chose L; otherwise CANT_SAY. Output sorted by user_id.
// Throws DataError when a user has fewer than 2 annotations or one annotator
// labeled the same user twice.
std::vector<LabeledUser> resolve_majority(const std::vector<Annotation>& annotations);

// user_id -> resolved label in one dimension, CANT_SAY users omitted.
LabelMap decided_labels(const std::vector<LabeledUser>& users, Dimension dimension);

// Delimited table with header user_id,annotator_id,pro,anti. Comma or tab
// separated (detected from the header).
std::vector<Annotation> load_annotations(const std::filesystem::path& path);
void save_annotations(const std::filesystem::path& path, const std::vector<Annotation>& annotations);

}  // namespace polorient
