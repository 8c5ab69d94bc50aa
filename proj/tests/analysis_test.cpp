#include <gtest/gtest.h>

#include <bit>

#include "support.hpp"
#include "transaxis/analysis.hpp"

using namespace transaxis;
using testing_support::paper;

namespace {

/// Exact one-sided p by walking all 2^n subsets, independent of the library's
/// prev_permutation enumeration.
double subset_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto n = static_cast<unsigned>(pooled.size());
  const double observed = median(b) - median(a);
  std::uint64_t hits = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) continue;
    std::vector<double> ga, gb;
    for (unsigned k = 0; k < n; ++k) ((mask >> k) & 1u ? ga : gb).push_back(pooled[k]);
    hits += median(gb) - median(ga) >= observed - 1e-12;
    ++total;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

ScoreHistogram from_counts(std::vector<std::uint64_t> counts) {
  ScoreHistogram h;
  h.bins = BinningSpec{2.0 / static_cast<double>(counts.size())};
  h.counts = std::move(counts);
  for (auto c : h.counts) h.n += c;
  return h;
}

}  // namespace

TEST(Histogram, Examples) {
  const std::vector<double> s{-1, 1};
  const auto h = histogram(s, 1.0);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1}));
  const auto one = histogram(std::vector<double>{0.37});
  EXPECT_EQ(one.n, 1u);
  EXPECT_EQ(one.median, 0.37);
  EXPECT_EQ(one.counts.size(), 100u);
  EXPECT_THROW(histogram(std::vector<double>{}), DataError);
  EXPECT_THROW(histogram(std::vector<double>{1.2}), ArgumentError);
}

TEST(Histogram, CountsSumToN) {
  Rng rng = make_rng(1);
  std::vector<double> s(1000);
  for (double& x : s) x = uniform01(rng) * 2 - 1;
  const auto h = histogram(s);
  std::uint64_t total = 0;
  for (auto c : h.counts) total += c;
  EXPECT_EQ(total, h.n);
  EXPECT_GE(h.median, -1.0);
  EXPECT_LE(h.median, 1.0);
}

TEST(Threshold, ThreeBinExample) {
  const auto t = detect_threshold(from_counts({5, 1, 4}));
  ASSERT_TRUE(t);
  EXPECT_NEAR(t->value, 0.0, 1e-12);
  EXPECT_EQ(t->bin, 1u);
}

TEST(Threshold, MonotoneIsUnimodal) {
  EXPECT_FALSE(detect_threshold(from_counts({1, 2, 3})));
  EXPECT_FALSE(detect_threshold(from_counts({3, 3, 3, 3})));
  EXPECT_FALSE(detect_threshold(from_counts({1, 4, 9, 16, 25, 30, 25, 16, 9, 4})));
}

TEST(Threshold, MinimumUsesRawCounts) {
  // Smoothing would flatten the single-bin dip at index 7.
  std::vector<std::uint64_t> c{1, 5, 20, 40, 20, 9, 9, 2, 9, 9, 20, 50, 20, 5, 1, 0, 0, 0, 0, 0};
  const auto t = detect_threshold(from_counts(c));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->bin, 7u);
  EXPECT_EQ(t->low_mode, 3u);
  EXPECT_EQ(t->high_mode, 11u);
}

TEST(Threshold, StrictlyBetweenTwoModes) {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 5 + uniform_index(rng, 20);
    const std::size_t p1 = uniform_index(rng, n - 3);
    const std::size_t p2 = p1 + 2 + uniform_index(rng, n - p1 - 2);
    const std::size_t v = p1 + 1 + uniform_index(rng, p2 - p1 - 1);
    // Strictly rising to p1, falling to v, rising to p2, falling after.
    std::vector<std::uint64_t> c(n);
    const std::uint64_t floor = uniform_index(rng, 3);
    for (std::size_t k = 0; k < n; ++k) {
      if (k <= p1) c[k] = floor + 10 + 10 * k;
      else if (k <= v) c[k] = c[p1] - 5 * (k - p1) > floor ? c[p1] - 5 * (k - p1) : floor;
      else if (k <= p2) c[k] = c[v] + 7 * (k - v);
      else c[k] = c[p2] > 3 * (k - p2) ? c[p2] - 3 * (k - p2) : 0;
    }
    auto h = from_counts(c);
    if (h.bins.count() != n) continue;
    // Smoothing may merge modes on long histograms; the raw-count case is exact.
    if (n >= 10) continue;
    const auto t = detect_threshold(h);
    ASSERT_TRUE(t) << trial;
    EXPECT_GT(t->value, h.bins.midpoint(p1));
    EXPECT_LT(t->value, h.bins.midpoint(p2));
  }
}

TEST(Threshold, FractionAbove) {
  const std::vector<double> s{-0.5, 0.1, 0.2, 0.9};
  EXPECT_EQ(fraction_above(s, 0.15), 0.5);
  EXPECT_EQ(fraction_above(std::vector<double>{}, 0.0), 0.0);
}

// ---------------------------------------------------------------------------

TEST(Groups, SingletonGroupsAndPartition) {
  const std::vector<KeyedScore> items{{"JAMA", 0.5}, {"JBC", -0.2}, {std::nullopt, 0.1}, {"JBC", -0.4}, {"JAMA", 0.7}};
  const auto g = group_summary(items);
  ASSERT_EQ(g.groups.size(), 2u);
  EXPECT_EQ(g.groups[0].key, "JBC");
  EXPECT_NEAR(g.groups[0].median, -0.3, 1e-15);
  EXPECT_NEAR(g.find("JAMA")->median, 0.6, 1e-15);
  EXPECT_EQ(g.excluded, 1u);
  EXPECT_EQ(g.keyed, 4u);
  std::size_t total = 0;
  for (const auto& s : g.groups) total += s.n;
  EXPECT_EQ(total, g.keyed);

  const std::vector<KeyedScore> two{{"a", 0.25}, {"b", -0.75}};
  const auto s2 = group_summary(two);
  EXPECT_EQ(s2.find("a")->median, 0.25);
  EXPECT_EQ(s2.find("b")->median, -0.75);
  EXPECT_EQ(s2.find("c"), nullptr);
}

TEST(Groups, QuartilesType7) {
  const std::vector<KeyedScore> items{{"k", 0.1}, {"k", 0.2}, {"k", 0.3}, {"k", 0.4}, {"k", 0.5}};
  const auto g = group_summary(items);
  EXPECT_NEAR(g.groups[0].q1, 0.2, 1e-15);
  EXPECT_NEAR(g.groups[0].q3, 0.4, 1e-15);
  EXPECT_EQ(g.groups[0].histogram.n, 5u);
}

// ---------------------------------------------------------------------------

TEST(Permutation, FrozenExactValueForThreePlusThree) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto r = permutation_test_median(a, b, 100000, 1);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.resamples, 20u);
  EXPECT_EQ(r.observed, 3.0);
  // Splits {1,2,3} and {1,2,4} reach the observed gap: 2 of 20.
  EXPECT_DOUBLE_EQ(r.p_value, 0.1);
  EXPECT_DOUBLE_EQ(subset_oracle(a, b), 0.1);
}

TEST(Permutation, ExactMatchesSubsetOracle) {
  Rng rng = make_rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> a(1 + uniform_index(rng, 6)), b(1 + uniform_index(rng, 6));
    for (double& x : a) x = std::round(uniform01(rng) * 10) / 10;
    for (double& x : b) x = std::round(uniform01(rng) * 10) / 10 + 0.1;
    const auto r = permutation_test_median(a, b, 1, 0, PermutationMode::Exact);
    EXPECT_DOUBLE_EQ(r.p_value, subset_oracle(a, b));
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Permutation, IdenticalGroupsAreNull) {
  const std::vector<double> a{0.1, 0.5, -0.2, 0.3}, b = a;
  const auto r = permutation_test_median(a, b, 100000, 3);
  EXPECT_EQ(r.observed, 0.0);
  EXPECT_GT(r.p_value, 0.4);
}

TEST(Permutation, ExactModeIsSeedIndependent) {
  const std::vector<double> a{0.3, 0.1, 0.2, 0.4, 0.0}, b{0.5, 0.35, 0.6, 0.2, 0.7};
  const auto x = permutation_test_median(a, b, 10, 1, PermutationMode::Exact);
  const auto y = permutation_test_median(a, b, 10, 999, PermutationMode::Exact);
  EXPECT_EQ(x.p_value, y.p_value);
  EXPECT_EQ(x.resamples, 252u);
}

TEST(Permutation, MonteCarloSeededAndBounded) {
  Rng rng = make_rng(10);
  std::vector<double> a(40), b(40);
  for (double& x : a) x = uniform01(rng);
  for (double& x : b) x = uniform01(rng) + 0.1;
  const auto r1 = permutation_test_median(a, b, 2000, 7);
  const auto r2 = permutation_test_median(a, b, 2000, 7);
  EXPECT_FALSE(r1.exact);
  EXPECT_EQ(r1.p_value, r2.p_value);
  EXPECT_GE(r1.p_value, 1.0 / 2001);
  EXPECT_LE(r1.p_value, 1.0);
  const auto t4a = permutation_test_median(a, b, 2000, 7, PermutationMode::Auto, 4);
  const auto t4b = permutation_test_median(a, b, 2000, 7, PermutationMode::Auto, 4);
  EXPECT_EQ(t4a.p_value, t4b.p_value);
}

TEST(Permutation, ShiftLeavesPValueUnchanged) {
  Rng rng = make_rng(12);
  std::vector<double> a(30), b(30);
  for (double& x : a) x = uniform01(rng) * 0.5;
  for (double& x : b) x = uniform01(rng) * 0.5 + 0.05;
  auto sa = a, sb = b;
  for (double& x : sa) x += 0.25;
  for (double& x : sb) x += 0.25;
  const auto r = permutation_test_median(a, b, 5000, 4);
  const auto s = permutation_test_median(sa, sb, 5000, 4);
  EXPECT_EQ(r.p_value, s.p_value);
  EXPECT_NEAR(r.observed, s.observed, 1e-12);
}

TEST(Permutation, Errors) {
  const std::vector<double> a{1}, none;
  EXPECT_THROW(permutation_test_median(a, none, 10, 1), DataError);
  EXPECT_THROW(permutation_test_median(none, a, 10, 1), DataError);
  EXPECT_THROW(permutation_test_median(a, a, 0, 1, PermutationMode::MonteCarlo), ArgumentError);
}

// ---------------------------------------------------------------------------

namespace {

MeshVocabulary four_seed_vocab() {
  return MeshVocabulary::from_pairs({{"C1", "A11.1"}, {"C2", "A11.2"}, {"H1", "M01.1"}, {"H2", "M01.2"}, {"N", "G09"}});
}

}  // namespace

TEST(WithinBetween, DegenerateSharedVector) {
  TermEmbedding e(2000, 3, {0, 1, 2, 3, 4});
  for (std::size_t r = 0; r < 5; ++r) e.row(r)[0] = 1, e.row(r)[1] = 2, e.row(r)[2] = -1;
  const auto w = within_between_similarity(e, four_seed_vocab(), 100, 1);
  EXPECT_NEAR(w.within.mean, 1.0, 1e-12);
  EXPECT_NEAR(w.between.mean, 1.0, 1e-12);
  EXPECT_TRUE(w.exhaustive);
  EXPECT_EQ(w.within.pairs, 2u);
  EXPECT_EQ(w.between.pairs, 4u);
}

TEST(WithinBetween, SeparatedCommunities) {
  TermEmbedding e(2000, 2, {0, 1, 2, 3, 4});
  const double rows[5][2] = {{1, 0.1}, {1, -0.1}, {-1, 0.1}, {-1, -0.2}, {0, 1}};
  for (std::size_t r = 0; r < 5; ++r) e.row(r)[0] = rows[r][0], e.row(r)[1] = rows[r][1];
  const auto w = within_between_similarity(e, four_seed_vocab(), 1, 1);
  EXPECT_FALSE(w.exhaustive);
  EXPECT_EQ(w.within.pairs, 1u);
  const auto full = within_between_similarity(e, four_seed_vocab(), 1000, 1);
  EXPECT_GT(full.within.mean, full.between.mean);
}

TEST(WithinBetween, NeedsTwoTermsPerSide) {
  TermEmbedding e(2000, 2, {0, 2, 3});
  for (double& x : e.data()) x = 1;
  EXPECT_THROW(within_between_similarity(e, four_seed_vocab(), 10, 1), DataError);
}

// ---------------------------------------------------------------------------

TEST(Trials, GroupsAndChainedTests) {
  std::vector<PaperRecord> papers;
  std::unordered_map<std::string, PaperScore> scores;
  Rng rng = make_rng(3);
  for (int phase = 0; phase <= 4; ++phase) {
    for (int k = 0; k < 30; ++k) {
      auto p = paper("p" + std::to_string(phase) + "_" + std::to_string(k), 2000, {0});
      p.trial_phase = phase;
      scores[p.pmid] = PaperScore{std::clamp(-0.2 + 0.2 * phase + 0.05 * (uniform01(rng) - 0.5), -1.0, 1.0), 2000, 1, 1};
      papers.push_back(p);
    }
  }
  papers.push_back(paper("untagged", 2000, {0}));
  scores["untagged"] = {0.0, 2000, 1, 1};
  const auto t = trial_phase_summary(papers, scores, 1000, 1);
  EXPECT_EQ(t.groups.find("all")->n, 150u);
  EXPECT_EQ(t.groups.find("phase2")->n, 30u);
  EXPECT_EQ(t.groups.find("phase0"), nullptr);
  ASSERT_EQ(t.tests.size(), 3u);
  EXPECT_EQ(t.tests[0].group_a, "phase1");
  EXPECT_EQ(t.tests[2].group_b, "phase4");
  for (const auto& x : t.tests) EXPECT_LT(x.result.p_value, 0.01);
}

TEST(Trials, SinglePhaseSkipsTestsAndNoneIsError) {
  std::vector<PaperRecord> papers{paper("a", 2000, {0}), paper("b", 2000, {0})};
  papers[0].trial_phase = 3;
  papers[1].trial_phase = 3;
  std::unordered_map<std::string, PaperScore> scores{{"a", {0.1, 2000, 1, 1}}, {"b", {0.3, 2000, 1, 1}}};
  const auto t = trial_phase_summary(papers, scores, 100, 1);
  EXPECT_TRUE(t.tests.empty());
  EXPECT_EQ(t.groups.find("phase3")->n, 2u);
  papers[0].trial_phase.reset();
  papers[1].trial_phase.reset();
  EXPECT_THROW(trial_phase_summary(papers, scores, 100, 1), DataError);
}
