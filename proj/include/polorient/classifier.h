#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace polorient {

using FeatureRows = std::vector<std::vector<double>>;
using ConfusionMatrix = std::vector<std::vector<std::int64_t>>;

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;           // unlimited when empty
  std::optional<std::size_t> features_per_split;  // ceil(sqrt(d)) when empty
  std::size_t min_leaf = 1;
  std::uint64_t rng_seed = 0;
  // Worker threads for tree training; 0 picks the hardware concurrency.
  // Results do not depend on this value.
  std::size_t threads = 0;
};

// Axis-aligned binary tree in flat node arrays. Internal nodes send rows with
// row[feature] <= threshold left. Leaves have feature == -1.
struct DecisionTree {
  std::vector<std::int32_t> feature;
  std::vector<double> threshold;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  std::vector<std::int32_t> leaf_class;

  std::size_t node_count() const { return feature.size(); }
  std::int32_t predict_index(std::span<const double> row) const;
  bool operator==(const DecisionTree&) const = default;
};

class Forest {
 public:
  Forest() = default;
  Forest(std::vector<std::string> classes, std::size_t n_features, ForestParams params,
         std::vector<DecisionTree> trees);

  // Plurality vote; ties go to the lexicographically smallest class name.
  std::string predict(std::span<const double> row) const;
  std::vector<std::string> predict_all(const FeatureRows& rows) const;

  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t n_features() const { return n_features_; }
  const ForestParams& params() const { return params_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  // Versioned JSON model file.
  std::string to_json() const;
  static Forest from_json(const std::string& text);

  // Model equality: classes, dimension and every tree. Training-time
  // settings such as the thread count are not compared.
  bool operator==(const Forest& other) const;

 private:
  std::vector<std::string> classes_;  // sorted
  std::size_t n_features_ = 0;
  ForestParams params_;
  std::vector<DecisionTree> trees_;
};

// Gini-impurity CART trees on bootstrap samples. Tree t draws from its own
// stream seeded by (params.rng_seed, t), so the forest is a pure function of
// (rows, labels, params) whatever the thread count.
Forest train_forest(const FeatureRows& rows, const std::vector<std::string>& labels,
                    const ForestParams& params);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct EvalReport {
  std::vector<std::string> classes;
  ConfusionMatrix confusion;  // rows: true class, columns: predicted class
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;  // "efficiency"
  std::string protocol;   // how the numbers were produced
};

// Harmonic mean, 0 when both inputs are 0.
double f_measure(double precision, double recall);

// Precision per predicted column, recall per true row, accuracy trace/total.
// Empty columns or rows give 0. Throws DataError on a non-square matrix,
// negative cells, a class-count mismatch or a zero total.
EvalReport eval_metrics(const ConfusionMatrix& confusion, const std::vector<std::string>& classes);

// Subsamples every class without replacement to the smallest class count.
// Surviving rows keep their original relative order.
std::pair<FeatureRows, std::vector<std::string>> balance_classes(
    const FeatureRows& rows, const std::vector<std::string>& labels, std::uint64_t rng_seed);

// Index form of balance_classes.
std::vector<std::size_t> balanced_indices(const std::vector<std::string>& labels,
                                          std::uint64_t rng_seed);

enum class CvMode { kKFold, kRepeatedHoldout };

struct CvOptions {
  CvMode mode = CvMode::kKFold;
  std::size_t k = 10;
  // Classes to report even if absent from the labels.
  std::vector<std::string> extra_classes;
};

// Stratified fold assignment: fold index per row. Each class's rows are
// shuffled and dealt round-robin, continuing across classes.
std::vector<std::size_t> stratified_folds(const std::vector<std::string>& labels, std::size_t k,
                                          std::uint64_t rng_seed);

// kfold: each stratified fold is the test set once, confusion matrices
// summed. repeated holdout: k independent stratified 66/34 splits, confusion
// matrices summed and per-split metrics averaged.
EvalReport cross_validate(const FeatureRows& rows, const std::vector<std::string>& labels,
                          const CvOptions& options, const ForestParams& params,
                          std::uint64_t rng_seed);

}  // namespace polorient
