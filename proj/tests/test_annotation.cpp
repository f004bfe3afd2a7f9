#include "doctest.h"
#include "polorient/annotation.h"
#include "polorient/errors.h"
#include "polorient/rng.h"
#include "support.h"

using namespace polorient;

namespace {

constexpr Label A = Label::kAap;
constexpr Label B = Label::kBjp;
constexpr Label C = Label::kCong;
constexpr Label N = Label::kCantSay;

// Reference 4x4 agreement matrix, rows annotator 1, columns annotator 2, in
// the order AAP, BJP, CONG, CANT_SAY.
const int kTable[4][4] = {{18, 4, 0, 3}, {6, 76, 1, 21}, {0, 4, 2, 3}, {11, 11, 4, 86}};
const Label kOrder[4] = {A, B, C, N};

std::pair<LabelMap, LabelMap> expand(const int (&m)[4][4]) {
  LabelMap a, b;
  int id = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      for (int k = 0; k < m[r][c]; ++k) {
        const auto user = "u" + std::to_string(id++);
        a[user] = kOrder[r];
        b[user] = kOrder[c];
      }
    }
  }
  return {a, b};
}

std::vector<Annotation> triple(const std::string& user, Label x, Label y, Label z) {
  return {{user, "a1", x, N}, {user, "a2", y, N}, {user, "a3", z, N}};
}

}  // namespace

TEST_CASE("kappa from agreement fractions") {
  CHECK(kappa_from(0.732, 0.375) == doctest::Approx(0.5712).epsilon(1e-12));
  CHECK(std::fabs(kappa_from(0.732, 0.375) - 0.571) <= 0.001);
  CHECK(kappa_from(0.5, 0.5) == 0.0);
}

TEST_CASE("reference agreement matrix, brute-force oracle") {
  const auto [a, b] = expand(kTable);
  const auto s = agreement_stats(a, b);
  // Oracle: direct sums over cells and marginals.
  int n = 0, trace = 0, rows[4] = {}, cols[4] = {};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      n += kTable[r][c];
      rows[r] += kTable[r][c];
      cols[c] += kTable[r][c];
      if (r == c) trace += kTable[r][c];
    }
  }
  long chance = 0;
  for (int k = 0; k < 4; ++k) chance += static_cast<long>(rows[k]) * cols[k];
  CHECK(n == 250);
  CHECK(trace == 182);
  CHECK(chance == 23474);
  CHECK(s.n_items == 250);
  CHECK(s.pr_a == doctest::Approx(182.0 / 250.0).epsilon(1e-15));
  CHECK(s.pr_e == doctest::Approx(23474.0 / 62500.0).epsilon(1e-15));
  const double pa = 182.0 / 250.0, pe = 23474.0 / 62500.0;
  CHECK(std::fabs(s.kappa - (pa - pe) / (1 - pe)) < 1e-12);
  CHECK(s.kappa == doctest::Approx(0.5644).epsilon(1e-4));
  CHECK(s.kappa >= 0.56);
  CHECK(s.kappa <= 0.58);
}

TEST_CASE("agreement properties") {
  LabelMap a = {{"1", A}, {"2", B}, {"3", C}, {"4", N}, {"5", B}};
  auto s = agreement_stats(a, a);
  CHECK(s.pr_a == 1.0);
  CHECK(s.kappa == 1.0);

  // Label bijection leaves everything unchanged.
  const auto [x, y] = expand(kTable);
  auto perm = [](const LabelMap& m) {
    LabelMap out;
    for (const auto& [k, v] : m) out[k] = v == A ? C : v == C ? N : v == N ? B : A;
    return out;
  };
  const auto s1 = agreement_stats(x, y);
  const auto s2 = agreement_stats(perm(x), perm(y));
  CHECK(s1.pr_a == s2.pr_a);
  CHECK(s1.pr_e == doctest::Approx(s2.pr_e).epsilon(1e-15));
  CHECK(s1.kappa == doctest::Approx(s2.kappa).epsilon(1e-15));
  CHECK(s1.kappa <= s1.pr_a);

  CHECK_THROWS_AS(agreement_stats({}, {}), DataError);
  CHECK_THROWS_AS(agreement_stats({{"1", A}}, {{"2", A}}), DataError);
  CHECK_THROWS_AS(agreement_stats({{"1", A}, {"2", A}}, {{"1", A}, {"2", A}}), DegenerateAgreementError);
}

TEST_CASE("pairwise and mean kappa") {
  std::vector<Annotation> two;
  LabelMap a1, a2;
  Rng rng(4);
  for (int u = 0; u < 40; ++u) {
    const auto user = "u" + std::to_string(u);
    const Label x = kOrder[rng.uniform_index(4)];
    const Label y = rng.bernoulli(0.7) ? x : kOrder[rng.uniform_index(4)];
    two.push_back({user, "a1", x, N});
    two.push_back({user, "a2", y, N});
    a1[user] = x;
    a2[user] = y;
  }
  CHECK(mean_pairwise_kappa(two, Dimension::kPro) == agreement_stats(a1, a2).kappa);

  // Third annotator identical to the first: mean of {k12, 1, k12}.
  auto three = two;
  for (const auto& [user, label] : a1) three.push_back({user, "a3", label, N});
  const auto pairs = pairwise_agreement(three, Dimension::kPro);
  REQUIRE(pairs.size() == 3);
  const double k12 = pairs.at({"a1", "a2"}).kappa;
  const double k23 = pairs.at({"a2", "a3"}).kappa;
  CHECK(pairs.at({"a1", "a3"}).kappa == 1.0);
  CHECK(k12 == doctest::Approx(k23).epsilon(1e-15));
  // Hand-summed oracle.
  CHECK(mean_pairwise_kappa(three, Dimension::kPro) == doctest::Approx((k12 + 1.0 + k23) / 3.0).epsilon(1e-15));

  auto ragged = three;
  ragged.pop_back();
  CHECK_THROWS_AS(mean_pairwise_kappa(ragged, Dimension::kPro), DataError);
  std::vector<Annotation> single = {{"u", "a1", A, N}};
  CHECK_THROWS_AS(mean_pairwise_kappa(single, Dimension::kPro), DataError);
}

TEST_CASE("majority resolution") {
  auto r = resolve_majority(triple("x", B, B, N));
  REQUIRE(r.size() == 1);
  CHECK(r[0].pro == B);
  CHECK(resolve_majority(triple("x", A, B, C))[0].pro == N);
  // Even split resolves to CANT_SAY.
  std::vector<Annotation> four = {{"x", "1", A, N}, {"x", "2", A, N}, {"x", "3", B, N}, {"x", "4", B, N}};
  CHECK(resolve_majority(four)[0].pro == N);
  std::vector<Annotation> one = {{"x", "1", A, N}};
  CHECK_THROWS_AS(resolve_majority(one), DataError);
  std::vector<Annotation> twice = {{"x", "1", A, N}, {"x", "1", B, N}};
  CHECK_THROWS_AS(resolve_majority(twice), DataError);
}

TEST_CASE("1,000-user resolution matches a counting oracle") {
  // Planted Pro shares of the reference resolved counts (447/133/33/387).
  Rng rng(1000);
  std::vector<Annotation> all;
  std::map<Label, int> oracle;
  for (int u = 0; u < 1000; ++u) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%04d", u);
    const double x = rng.uniform01() * 1000.0;
    const Label truth = x < 447 ? B : x < 580 ? A : x < 613 ? C : N;
    std::map<Label, int> votes;
    for (const char* ann : {"a1", "a2", "a3"}) {
      const Label l = rng.bernoulli(0.2) ? kOrder[rng.uniform_index(4)] : truth;
      ++votes[l];
      all.push_back({buf, ann, l, truth});
    }
    Label decided = N;
    for (const auto& [l, v] : votes) {
      if (2 * v > 3) decided = l;
    }
    ++oracle[decided];
  }
  const auto resolved = resolve_majority(all);
  CHECK(resolved.size() == 1000);
  std::map<Label, int> hist;
  for (const auto& u : resolved) ++hist[u.pro];
  CHECK(hist == oracle);
  int sum = 0;
  for (const auto& [l, v] : hist) sum += v;
  CHECK(sum == 1000);
  // No resolved party label was chosen by half or fewer of the annotators.
  std::map<std::string, std::map<Label, int>> counts;
  for (const auto& a : all) ++counts[a.user_id][a.pro];
  for (const auto& u : resolved) {
    if (u.pro != N) CHECK(2 * counts[u.user_id][u.pro] > 3);
  }
  const auto decided = decided_labels(resolved, Dimension::kPro);
  CHECK(decided.size() == static_cast<std::size_t>(1000 - hist[N]));
}

TEST_CASE("annotation files round-trip, csv and tsv") {
  testsupport::TempDir dir;
  std::vector<Annotation> ann = {{"u1", "a1", A, B}, {"u1", "a2", C, N}};
  save_annotations(dir / "a.csv", ann);
  const auto back = load_annotations(dir / "a.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].pro == C);
  CHECK(back[1].anti == N);
  testsupport::spit(dir / "a.tsv", "user_id\tannotator_id\tpro\tanti\nu1\ta1\tBJP\tAAP\n");
  CHECK(load_annotations(dir / "a.tsv")[0].pro == B);
  testsupport::spit(dir / "bad.csv", "user_id,annotator_id,pro,anti\nu1,a1,bjp,AAP\n");
  CHECK_THROWS_AS(load_annotations(dir / "bad.csv"), DataError);
}
