#include "polorient/classifier.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include "json.hpp"
#include <numeric>
#include <set>
#include <thread>

#include "polorient/errors.h"
#include "polorient/rng.h"

namespace polorient {
namespace {

constexpr int kModelVersion = 1;
constexpr double kHoldoutTrainFraction = 0.66;

struct Sample {
  double value;
  std::int32_t label;
};

// Sum over classes of count^2 / total; larger means purer.
double purity(std::span<const std::size_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double s = 0.0;
  for (auto c : counts) s += static_cast<double>(c) * static_cast<double>(c);
  return s / static_cast<double>(total);
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureRows& rows, const std::vector<std::int32_t>& labels,
              std::size_t n_classes, const ForestParams& params, std::size_t mtry,
              std::uint64_t seed)
      : rows_(rows),
        labels_(labels),
        n_classes_(n_classes),
        params_(params),
        mtry_(mtry),
        rng_(seed),
        feature_order_(rows.front().size()) {
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
  }

  DecisionTree build() {
    const std::size_t n = rows_.size();
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = rng_.uniform_index(n);
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double score = -1.0;
  };

  std::int32_t add_leaf(std::int32_t cls) {
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(0.0);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.leaf_class.push_back(cls);
    return static_cast<std::int32_t>(tree_.feature.size() - 1);
  }

  std::int32_t grow(std::vector<std::size_t>& idx, std::size_t depth) {
    std::vector<std::size_t> counts(n_classes_, 0);
    for (auto i : idx) ++counts[labels_[i]];
    // Majority with ties to the smallest class index.
    std::int32_t majority = 0;
    std::size_t distinct = 0;
    for (std::size_t c = 0; c < n_classes_; ++c) {
      if (counts[c] > 0) ++distinct;
      if (counts[c] > counts[majority]) majority = static_cast<std::int32_t>(c);
    }
    const bool depth_exhausted = params_.max_depth && depth >= *params_.max_depth;
    if (distinct <= 1 || depth_exhausted || idx.size() < 2 * params_.min_leaf) {
      return add_leaf(majority);
    }

    const Split split = find_split(idx);
    if (split.feature < 0) return add_leaf(majority);

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (auto i : idx) {
      (rows_[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    const auto node = add_leaf(-1);
    tree_.feature[node] = split.feature;
    tree_.threshold[node] = split.threshold;
    const auto l = grow(left_idx, depth + 1);
    tree_.left[node] = l;
    const auto r = grow(right_idx, depth + 1);
    tree_.right[node] = r;
    return node;
  }

  // Draws features without replacement; the first `mtry` are always scored,
  // further ones only until a usable split exists.
  Split find_split(const std::vector<std::size_t>& idx) {
    Split best;
    const std::size_t d = feature_order_.size();
    for (std::size_t drawn = 0; drawn < d; ++drawn) {
      const std::size_t pick = drawn + rng_.uniform_index(d - drawn);
      std::swap(feature_order_[drawn], feature_order_[pick]);
      if (drawn >= mtry_ && best.feature >= 0) break;
      score_feature(idx, static_cast<std::int32_t>(feature_order_[drawn]), best);
    }
    return best;
  }

  void score_feature(const std::vector<std::size_t>& idx, std::int32_t feature, Split& best) {
    samples_.clear();
    for (auto i : idx) samples_.push_back({rows_[i][feature], labels_[i]});
    std::sort(samples_.begin(), samples_.end(), [](const Sample& a, const Sample& b) {
      return a.value < b.value || (a.value == b.value && a.label < b.label);
    });
    if (samples_.front().value == samples_.back().value) return;

    left_counts_.assign(n_classes_, 0);
    right_counts_.assign(n_classes_, 0);
    for (const auto& s : samples_) ++right_counts_[s.label];
    const std::size_t n = samples_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left_counts_[samples_[i].label];
      --right_counts_[samples_[i].label];
      const double lo = samples_[i].value;
      const double hi = samples_[i + 1].value;
      if (lo == hi) continue;
      const std::size_t n_left = i + 1;
      if (n_left < params_.min_leaf || n - n_left < params_.min_leaf) continue;
      const double score = purity(left_counts_, n_left) + purity(right_counts_, n - n_left);
      if (score > best.score) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = {feature, threshold, score};
      }
    }
  }

  const FeatureRows& rows_;
  const std::vector<std::int32_t>& labels_;
  std::size_t n_classes_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng rng_;
  std::vector<std::size_t> feature_order_;
  std::vector<Sample> samples_;
  std::vector<std::size_t> left_counts_;
  std::vector<std::size_t> right_counts_;
  DecisionTree tree_;
};

std::vector<std::string> sorted_classes(const std::vector<std::string>& labels,
                                        const std::vector<std::string>& extra = {}) {
  std::set<std::string> set(labels.begin(), labels.end());
  set.insert(extra.begin(), extra.end());
  return {set.begin(), set.end()};
}

std::size_t class_index(const std::vector<std::string>& classes, const std::string& label) {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  return static_cast<std::size_t>(it - classes.begin());
}

template <typename T>
std::vector<T> gather(const std::vector<T>& items, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

ConfusionMatrix empty_confusion(std::size_t n) {
  return ConfusionMatrix(n, std::vector<std::int64_t>(n, 0));
}

void accumulate_predictions(const Forest& forest, const FeatureRows& rows,
                            const std::vector<std::string>& labels,
                            const std::vector<std::size_t>& test_idx,
                            const std::vector<std::string>& classes, ConfusionMatrix& confusion) {
  for (auto i : test_idx) {
    const auto predicted = forest.predict(rows[i]);
    ++confusion[class_index(classes, labels[i])][class_index(classes, predicted)];
  }
}

}  // namespace

std::int32_t DecisionTree::predict_index(std::span<const double> row) const {
  std::int32_t node = 0;
  while (feature[node] >= 0) {
    node = row[feature[node]] <= threshold[node] ? left[node] : right[node];
  }
  return leaf_class[node];
}

Forest::Forest(std::vector<std::string> classes, std::size_t n_features, ForestParams params,
               std::vector<DecisionTree> trees)
    : classes_(std::move(classes)),
      n_features_(n_features),
      params_(params),
      trees_(std::move(trees)) {}

bool Forest::operator==(const Forest& other) const {
  return classes_ == other.classes_ && n_features_ == other.n_features_ && trees_ == other.trees_;
}

std::string Forest::predict(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw DataError("row has " + std::to_string(row.size()) + " features; forest expects " +
                    std::to_string(n_features_));
  }
  std::vector<std::size_t> votes(classes_.size(), 0);
  for (const auto& tree : trees_) ++votes[tree.predict_index(row)];
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return classes_[best];
}

std::vector<std::string> Forest::predict_all(const FeatureRows& rows) const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(predict(row));
  return out;
}

std::string Forest::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = "polorient-forest";
  doc["version"] = kModelVersion;
  doc["classes"] = classes_;
  doc["n_features"] = n_features_;
  doc["params"] = {{"n_trees", params_.n_trees},
                   {"max_depth", params_.max_depth ? nlohmann::ordered_json(*params_.max_depth)
                                                   : nlohmann::ordered_json(nullptr)},
                   {"features_per_split", params_.features_per_split
                                              ? nlohmann::ordered_json(*params_.features_per_split)
                                              : nlohmann::ordered_json(nullptr)},
                   {"min_leaf", params_.min_leaf},
                   {"rng_seed", params_.rng_seed}};
  auto& trees = doc["trees"] = nlohmann::ordered_json::array();
  for (const auto& t : trees_) {
    trees.push_back({{"feature", t.feature},
                     {"threshold", t.threshold},
                     {"left", t.left},
                     {"right", t.right},
                     {"leaf_class", t.leaf_class}});
  }
  return doc.dump();
}

Forest Forest::from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != "polorient-forest") throw DataError("not a forest model file");
    if (doc.at("version").get<int>() != kModelVersion) {
      throw DataError("unsupported model version " + doc.at("version").dump());
    }
    ForestParams params;
    const auto& p = doc.at("params");
    params.n_trees = p.at("n_trees").get<std::size_t>();
    if (!p.at("max_depth").is_null()) params.max_depth = p.at("max_depth").get<std::size_t>();
    if (!p.at("features_per_split").is_null()) {
      params.features_per_split = p.at("features_per_split").get<std::size_t>();
    }
    params.min_leaf = p.at("min_leaf").get<std::size_t>();
    params.rng_seed = p.at("rng_seed").get<std::uint64_t>();

    auto classes = doc.at("classes").get<std::vector<std::string>>();
    const auto n_features = doc.at("n_features").get<std::size_t>();
    std::vector<DecisionTree> trees;
    for (const auto& t : doc.at("trees")) {
      DecisionTree tree;
      tree.feature = t.at("feature").get<std::vector<std::int32_t>>();
      tree.threshold = t.at("threshold").get<std::vector<double>>();
      tree.left = t.at("left").get<std::vector<std::int32_t>>();
      tree.right = t.at("right").get<std::vector<std::int32_t>>();
      tree.leaf_class = t.at("leaf_class").get<std::vector<std::int32_t>>();
      const auto n = static_cast<std::int32_t>(tree.feature.size());
      if (n == 0 || tree.threshold.size() != tree.feature.size() ||
          tree.left.size() != tree.feature.size() || tree.right.size() != tree.feature.size() ||
          tree.leaf_class.size() != tree.feature.size()) {
        throw DataError("inconsistent tree node arrays");
      }
      for (std::int32_t i = 0; i < n; ++i) {
        if (tree.feature[i] < 0) {
          if (tree.leaf_class[i] < 0 || tree.leaf_class[i] >= static_cast<std::int32_t>(classes.size())) {
            throw DataError("leaf class out of range");
          }
        } else if (tree.feature[i] >= static_cast<std::int32_t>(n_features) || tree.left[i] <= i ||
                   tree.right[i] <= i || tree.left[i] >= n || tree.right[i] >= n) {
          throw DataError("malformed internal node");
        }
      }
      trees.push_back(std::move(tree));
    }
    return Forest(std::move(classes), n_features, params, std::move(trees));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

Forest train_forest(const FeatureRows& rows, const std::vector<std::string>& labels,
                    const ForestParams& params) {
  if (rows.empty()) throw DataError("cannot train on zero rows");
  if (rows.size() != labels.size()) {
    throw DataError("label count " + std::to_string(labels.size()) + " != row count " +
                    std::to_string(rows.size()));
  }
  const std::size_t d = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("ragged feature rows");
  }
  if (params.n_trees == 0) throw ConfigError("n_trees must be positive");
  if (params.min_leaf == 0) throw ConfigError("min_leaf must be positive");
  if (params.max_depth && *params.max_depth == 0) throw ConfigError("max_depth must be positive");

  const auto classes = sorted_classes(labels);
  std::vector<std::int32_t> label_idx;
  label_idx.reserve(labels.size());
  for (const auto& l : labels) label_idx.push_back(static_cast<std::int32_t>(class_index(classes, l)));

  std::size_t mtry = params.features_per_split.value_or(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
  if (d == 0) {
    mtry = 0;
  } else if (mtry == 0 || mtry > d) {
    throw ConfigError("features_per_split must be in [1, " + std::to_string(d) + "]");
  }

  std::vector<DecisionTree> trees(params.n_trees);
  auto train_one = [&](std::size_t t) {
    if (d == 0) {
      // No attributes: every tree is the majority leaf.
      std::vector<std::size_t> counts(classes.size(), 0);
      for (auto l : label_idx) ++counts[l];
      const auto majority = std::max_element(counts.begin(), counts.end()) - counts.begin();
      trees[t] = DecisionTree{{-1}, {0.0}, {-1}, {-1}, {static_cast<std::int32_t>(majority)}};
      return;
    }
    TreeBuilder builder(rows, label_idx, classes.size(), params, mtry, derive_seed(params.rng_seed, t));
    trees[t] = builder.build();
  };

  std::size_t workers = params.threads ? params.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, params.n_trees);
  if (workers == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) train_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < params.n_trees; t = next++) train_one(t);
      });
    }
  }
  return Forest(classes, d, params, std::move(trees));
}

double f_measure(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

EvalReport eval_metrics(const ConfusionMatrix& confusion, const std::vector<std::string>& classes) {
  const std::size_t n = confusion.size();
  if (classes.size() != n) throw DataError("confusion matrix size does not match class count");
  std::int64_t total = 0;
  std::int64_t trace = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (confusion[i].size() != n) throw DataError("confusion matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (confusion[i][j] < 0) throw DataError("negative confusion cell");
      total += confusion[i][j];
    }
    trace += confusion[i][i];
  }
  if (total <= 0) throw DataError("confusion matrix is empty");

  EvalReport report;
  report.classes = classes;
  report.confusion = confusion;
  report.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  for (std::size_t c = 0; c < n; ++c) {
    std::int64_t row = 0;
    std::int64_t col = 0;
    for (std::size_t k = 0; k < n; ++k) {
      row += confusion[c][k];
      col += confusion[k][c];
    }
    ClassMetrics m;
    m.precision = col ? static_cast<double>(confusion[c][c]) / static_cast<double>(col) : 0.0;
    m.recall = row ? static_cast<double>(confusion[c][c]) / static_cast<double>(row) : 0.0;
    m.f_measure = f_measure(m.precision, m.recall);
    report.per_class.push_back(m);
  }
  return report;
}

std::vector<std::size_t> balanced_indices(const std::vector<std::string>& labels,
                                          std::uint64_t rng_seed) {
  if (labels.empty()) throw DataError("cannot balance an empty data set");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::size_t smallest = labels.size();
  for (const auto& [cls, idx] : by_class) smallest = std::min(smallest, idx.size());

  Rng rng(derive_seed(rng_seed, 0xba1a));
  std::vector<std::size_t> keep;
  for (auto& [cls, idx] : by_class) {
    // Partial Fisher-Yates: the first `smallest` slots are a uniform sample.
    for (std::size_t i = 0; i < smallest; ++i) {
      std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
    }
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

std::pair<FeatureRows, std::vector<std::string>> balance_classes(
    const FeatureRows& rows, const std::vector<std::string>& labels, std::uint64_t rng_seed) {
  if (rows.size() != labels.size()) throw DataError("label count does not match row count");
  const auto keep = balanced_indices(labels, rng_seed);
  return {gather(rows, keep), gather(labels, keep)};
}

std::vector<std::size_t> stratified_folds(const std::vector<std::string>& labels, std::size_t k,
                                          std::uint64_t rng_seed) {
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<std::size_t> fold(labels.size(), 0);
  Rng rng(derive_seed(rng_seed, 0xf01d));
  std::size_t offset = 0;
  for (auto& [cls, idx] : by_class) {
    if (idx.size() < k) {
      throw DataError("class " + cls + " has " + std::to_string(idx.size()) + " rows; " +
                      std::to_string(k) + "-fold stratification needs at least " + std::to_string(k));
    }
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) fold[idx[i]] = (offset + i) % k;
    offset += idx.size();
  }
  return fold;
}

EvalReport cross_validate(const FeatureRows& rows, const std::vector<std::string>& labels,
                          const CvOptions& options, const ForestParams& params,
                          std::uint64_t rng_seed) {
  if (rows.size() != labels.size()) throw DataError("label count does not match row count");
  if (rows.empty()) throw DataError("cannot cross-validate zero rows");
  if (options.k < 2) throw ConfigError("cross-validation needs k >= 2");
  const auto classes = sorted_classes(labels, options.extra_classes);

  if (options.mode == CvMode::kKFold) {
    const auto fold = stratified_folds(labels, options.k, rng_seed);
    auto confusion = empty_confusion(classes.size());
    for (std::size_t f = 0; f < options.k; ++f) {
      std::vector<std::size_t> train_idx;
      std::vector<std::size_t> test_idx;
      for (std::size_t i = 0; i < rows.size(); ++i) (fold[i] == f ? test_idx : train_idx).push_back(i);
      ForestParams fold_params = params;
      fold_params.rng_seed = derive_seed(rng_seed, f + 1);
      const auto forest = train_forest(gather(rows, train_idx), gather(labels, train_idx), fold_params);
      accumulate_predictions(forest, rows, labels, test_idx, classes, confusion);
    }
    auto report = eval_metrics(confusion, classes);
    report.protocol = std::to_string(options.k) + "-fold stratified cross-validation";
    return report;
  }

  // Repeated stratified holdout.
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  auto summed = empty_confusion(classes.size());
  std::vector<ClassMetrics> mean(classes.size());
  double mean_accuracy = 0.0;
  for (std::size_t rep = 0; rep < options.k; ++rep) {
    Rng rng(derive_seed(rng_seed, 0x401d0000ULL + rep));
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (auto [cls, idx] : by_class) {
      rng.shuffle(idx);
      auto n_train = static_cast<std::size_t>(
          std::llround(kHoldoutTrainFraction * static_cast<double>(idx.size())));
      if (idx.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
      train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
      test_idx.insert(test_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    if (test_idx.empty()) throw DataError("holdout split left no test rows");

    ForestParams rep_params = params;
    rep_params.rng_seed = derive_seed(rng_seed, rep + 1);
    const auto forest = train_forest(gather(rows, train_idx), gather(labels, train_idx), rep_params);
    auto confusion = empty_confusion(classes.size());
    accumulate_predictions(forest, rows, labels, test_idx, classes, confusion);
    const auto split_report = eval_metrics(confusion, classes);
    mean_accuracy += split_report.accuracy;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      mean[c].precision += split_report.per_class[c].precision;
      mean[c].recall += split_report.per_class[c].recall;
      mean[c].f_measure += split_report.per_class[c].f_measure;
      for (std::size_t j = 0; j < classes.size(); ++j) summed[c][j] += confusion[c][j];
    }
  }
  const auto reps = static_cast<double>(options.k);
  EvalReport report;
  report.classes = classes;
  report.confusion = std::move(summed);
  report.accuracy = mean_accuracy / reps;
  for (auto& m : mean) {
    m.precision /= reps;
    m.recall /= reps;
    m.f_measure /= reps;
  }
  report.per_class = std::move(mean);
  report.protocol = std::to_string(options.k) + "x repeated stratified 66/34 holdout";
  return report;
}

}  // namespace polorient
