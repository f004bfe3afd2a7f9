#include "doctest.h"
#include "polorient/classifier.h"
#include "polorient/errors.h"
#include "polorient/rng.h"
#include "support.h"

using namespace polorient;
using testsupport::gaussian_blobs;

namespace {

double train_accuracy(const Forest& f, const FeatureRows& rows, const std::vector<std::string>& labels) {
  const auto pred = f.predict_all(rows);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == labels[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

DecisionTree leaf(std::int32_t cls) { return {{-1}, {0.0}, {-1}, {-1}, {cls}}; }

}  // namespace

TEST_CASE("f-measure") {
  CHECK(f_measure(0.0, 0.0) == 0.0);
  CHECK(f_measure(1.0, 1.0) == 1.0);
  CHECK(std::fabs(f_measure(0.736, 0.975) - 0.839) <= 0.001);
}

TEST_CASE("eval_metrics against hand arithmetic") {
  const auto r = eval_metrics({{10, 0, 0}, {0, 10, 0}, {0, 0, 10}}, {"AAP", "BJP", "CONG"});
  CHECK(r.accuracy == 1.0);
  for (const auto& m : r.per_class) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f_measure == 1.0);
  }
  // Random 3x3 with direct arithmetic.
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    ConfusionMatrix m(3, std::vector<std::int64_t>(3));
    for (auto& row : m) {
      for (auto& c : row) c = static_cast<std::int64_t>(rng.uniform_index(20));
    }
    m[0][0] += 1;
    const auto e = eval_metrics(m, {"A", "B", "C"});
    double total = 0, trace = 0;
    for (int i = 0; i < 3; ++i) {
      double row = 0, col = 0;
      for (int j = 0; j < 3; ++j) {
        row += static_cast<double>(m[i][j]);
        col += static_cast<double>(m[j][i]);
        total += static_cast<double>(m[i][j]);
      }
      trace += static_cast<double>(m[i][i]);
      const double p = col ? m[i][i] / col : 0.0;
      const double rc = row ? m[i][i] / row : 0.0;
      CHECK(e.per_class[i].precision == doctest::Approx(p).epsilon(1e-15));
      CHECK(e.per_class[i].recall == doctest::Approx(rc).epsilon(1e-15));
      CHECK(e.per_class[i].f_measure == doctest::Approx(p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0).epsilon(1e-15));
    }
    CHECK(e.accuracy == doctest::Approx(trace / total).epsilon(1e-15));
  }
  // Empty class prints zeros.
  const auto z = eval_metrics({{5, 0}, {0, 0}}, {"BJP", "CONG"});
  CHECK(z.per_class[1].precision == 0.0);
  CHECK(z.per_class[1].recall == 0.0);
  CHECK(z.per_class[1].f_measure == 0.0);
  CHECK_THROWS_AS(eval_metrics({{1, 2}}, {"A", "B"}), DataError);
  CHECK_THROWS_AS(eval_metrics({{0, 0}, {0, 0}}, {"A", "B"}), DataError);
  CHECK_THROWS_AS(eval_metrics({{1, -1}, {0, 1}}, {"A", "B"}), DataError);
}

TEST_CASE("accuracy equals mean recall only for balanced classes") {
  auto mean_recall = [](const EvalReport& r) {
    double s = 0;
    for (const auto& m : r.per_class) s += m.recall;
    return s / static_cast<double>(r.per_class.size());
  };
  const auto balanced = eval_metrics({{8, 2}, {3, 7}}, {"A", "B"});
  CHECK(balanced.accuracy == doctest::Approx(mean_recall(balanced)));
  const auto skewed = eval_metrics({{80, 2}, {3, 7}}, {"A", "B"});
  CHECK(skewed.accuracy != doctest::Approx(mean_recall(skewed)));
}

TEST_CASE("single-class training predicts that class") {
  FeatureRows rows = {{1, 2}, {3, 4}, {5, 6}};
  std::vector<std::string> labels(3, "BJP");
  const auto f = train_forest(rows, labels, {.n_trees = 5});
  for (const auto& p : f.predict_all({{0, 0}, {9, 9}})) CHECK(p == "BJP");
  CHECK_THROWS_AS(train_forest({}, {}, {}), DataError);
  CHECK_THROWS_AS(train_forest(rows, {"A"}, {}), DataError);
}

TEST_CASE("voting and ties") {
  Forest f({"AAP", "BJP"}, 1, {}, {leaf(0), leaf(0), leaf(1)});
  const std::vector<double> row = {0.0};
  CHECK(f.predict(row) == "AAP");
  Forest tie({"AAP", "BJP", "CONG"}, 1, {}, {leaf(2), leaf(1)});
  CHECK(tie.predict(row) == "BJP");
  Forest one({"AAP", "BJP"}, 1, {}, {leaf(1)});
  CHECK(one.predict(row) == "BJP");
  const std::vector<double> wrong = {1.0, 2.0};
  CHECK_THROWS_AS(f.predict(wrong), DataError);
}

TEST_CASE("separable blobs: training accuracy 1") {
  const auto blobs = gaussian_blobs(40, 4, 8.0, 1);
  REQUIRE(testsupport::nearest_centroid_accuracy(blobs) == 1.0);
  const auto f = train_forest(blobs.rows, blobs.labels, {.n_trees = 100, .rng_seed = 9});
  CHECK(f.trees().size() == 100);
  CHECK(train_accuracy(f, blobs.rows, blobs.labels) == 1.0);
  for (const auto& t : f.trees()) {
    for (auto feat : t.feature) CHECK(feat < 4);
  }
}

TEST_CASE("determinism across runs and thread counts") {
  const auto blobs = gaussian_blobs(30, 5, 2.0, 2);
  ForestParams p{.n_trees = 40, .rng_seed = 77, .threads = 1};
  const auto a = train_forest(blobs.rows, blobs.labels, p);
  const auto b = train_forest(blobs.rows, blobs.labels, p);
  p.threads = 4;
  const auto c = train_forest(blobs.rows, blobs.labels, p);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.to_json() == c.to_json());
  p.rng_seed = 78;
  CHECK_FALSE(a == train_forest(blobs.rows, blobs.labels, p));
}

TEST_CASE("model json round-trip") {
  const auto blobs = gaussian_blobs(15, 3, 3.0, 4);
  const auto f = train_forest(blobs.rows, blobs.labels, {.n_trees = 7, .max_depth = 3, .rng_seed = 1});
  const auto back = Forest::from_json(f.to_json());
  CHECK(back == f);
  CHECK(back.predict_all(blobs.rows) == f.predict_all(blobs.rows));
  CHECK_THROWS_AS(Forest::from_json("{}"), DataError);
  CHECK_THROWS_AS(Forest::from_json("not json"), DataError);
  for (const auto& t : f.trees()) {
    // Depth limit 3 allows at most 15 nodes.
    CHECK(t.node_count() <= 15);
  }
}

TEST_CASE("scaling one feature leaves predictions unchanged") {
  const auto blobs = gaussian_blobs(25, 4, 2.5, 6);
  auto scaled = blobs.rows;
  for (auto& r : scaled) r[1] *= 1000.0;
  const ForestParams p{.n_trees = 30, .rng_seed = 3};
  const auto a = train_forest(blobs.rows, blobs.labels, p);
  const auto b = train_forest(scaled, blobs.labels, p);
  CHECK(a.predict_all(blobs.rows) == b.predict_all(scaled));
}

TEST_CASE("class balancing") {
  std::vector<std::string> labels;
  labels.insert(labels.end(), 133, "AAP");
  labels.insert(labels.end(), 447, "BJP");
  labels.insert(labels.end(), 33, "CONG");
  Rng rng(1);
  rng.shuffle(labels);
  auto idx = balanced_indices(labels, 5);
  CHECK(idx.size() == 99);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  std::map<std::string, int> counts;
  for (auto i : idx) ++counts[labels[i]];
  CHECK(counts == std::map<std::string, int>{{"AAP", 33}, {"BJP", 33}, {"CONG", 33}});
  CHECK(balanced_indices(labels, 5) == idx);

  std::vector<std::string> anti;
  anti.insert(anti.end(), 205, "AAP");
  anti.insert(anti.end(), 85, "BJP");
  anti.insert(anti.end(), 135, "CONG");
  CHECK(balanced_indices(anti, 1).size() == 255);

  FeatureRows rows = {{1}, {2}, {3}};
  std::vector<std::string> even = {"A", "B", "C"};
  const auto [r2, l2] = balance_classes(rows, even, 9);
  CHECK(r2 == rows);
  CHECK(l2 == even);
}

TEST_CASE("stratified folds keep class proportions") {
  std::vector<std::string> labels;
  labels.insert(labels.end(), 133, "AAP");
  labels.insert(labels.end(), 447, "BJP");
  labels.insert(labels.end(), 33, "CONG");
  const auto folds = stratified_folds(labels, 10, 3);
  std::map<std::string, double> global;
  for (const auto& l : labels) global[l] += 1.0;
  for (std::size_t f = 0; f < 10; ++f) {
    std::map<std::string, double> in_fold;
    double size = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (folds[i] == f) {
        in_fold[labels[i]] += 1.0;
        size += 1.0;
      }
    }
    // Every class is spread as evenly as k allows.
    for (const auto& [cls, n] : global) {
      CHECK(in_fold[cls] >= std::floor(n / 10.0));
      CHECK(in_fold[cls] <= std::ceil(n / 10.0));
    }
    CHECK(size >= 61);
    CHECK(size <= 62);
  }
  std::vector<std::string> tiny = {"A", "A", "B"};
  CHECK_THROWS_AS(stratified_folds(tiny, 2, 1), DataError);
}

TEST_CASE("cross-validation on blobs and permuted labels") {
  const auto blobs = gaussian_blobs(30, 4, 8.0, 10);
  const ForestParams p{.n_trees = 25, .rng_seed = 2};
  const auto r = cross_validate(blobs.rows, blobs.labels, {}, p, 4);
  CHECK(r.accuracy >= 0.95);
  CHECK(r.protocol == "10-fold stratified cross-validation");
  std::int64_t total = 0;
  for (const auto& row : r.confusion) {
    for (auto c : row) total += c;
  }
  CHECK(total == 90);

  const auto h = cross_validate(blobs.rows, blobs.labels, {CvMode::kRepeatedHoldout, 5, {}}, p, 4);
  CHECK(h.accuracy >= 0.95);
  CHECK(h.protocol.find("66/34") != std::string::npos);

  auto shuffled = blobs.labels;
  Rng rng(8);
  rng.shuffle(shuffled);
  const auto null = cross_validate(blobs.rows, shuffled, {}, p, 4);
  CHECK(null.accuracy < 0.6);
}

TEST_CASE("single-class cross-validation reports absent classes as zero") {
  FeatureRows rows;
  for (int i = 0; i < 20; ++i) rows.push_back({static_cast<double>(i)});
  std::vector<std::string> labels(20, "BJP");
  const auto r = cross_validate(rows, labels, {CvMode::kKFold, 10, {"AAP", "BJP", "CONG"}}, {.n_trees = 5}, 1);
  CHECK(r.accuracy == 1.0);
  REQUIRE(r.classes == std::vector<std::string>{"AAP", "BJP", "CONG"});
  CHECK(r.per_class[0].precision == 0.0);
  CHECK(r.per_class[2].recall == 0.0);
  CHECK(r.per_class[1].f_measure == 1.0);
}

TEST_CASE("cross-validation is deterministic") {
  const auto blobs = gaussian_blobs(20, 3, 1.5, 12);
  ForestParams p{.n_trees = 15, .rng_seed = 5, .threads = 1};
  const auto a = cross_validate(blobs.rows, blobs.labels, {}, p, 6);
  p.threads = 3;
  const auto b = cross_validate(blobs.rows, blobs.labels, {}, p, 6);
  CHECK(a.confusion == b.confusion);
  CHECK(a.accuracy == b.accuracy);
}
