#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>

#include "transaxis/binning.hpp"
#include "transaxis/core.hpp"

using namespace transaxis;

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a = make_rng(7, 1), b = make_rng(7, 1), c = make_rng(7, 2), d = make_rng(8, 1);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng = make_rng(3);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 1000; ++k) {
    const auto v = uniform_index(rng, 7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  for (int k = 0; k < 1000; ++k) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, ShuffleKeepsMultiset) {
  std::vector<int> v{1, 1, 2, 3, 5, 8, 13};
  auto sorted = v;
  Rng rng = make_rng(11);
  shuffle(v, rng);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, sorted);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e, unsigned) {
      for (std::size_t k = b; k < e; ++k) ++hits[k];
    });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, PropagatesWorkerExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t b, std::size_t, unsigned) {
                              if (b > 0) throw DataError("boom");
                            }),
               DataError);
}

TEST(Text, SplitKeepsEmptyFields) {
  const auto f = split("a\t\tb\t", '\t');
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[2], "b");
  EXPECT_EQ(trim("  x y \t"), "x y");
  EXPECT_EQ(chomp("row\r"), "row");
}

TEST(Text, RealFormattingAndParsing) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_optional(std::nullopt), "NA");
  EXPECT_TRUE(std::isnan(parse_real("NA", "x")));
  EXPECT_DOUBLE_EQ(parse_real("-2.5e-1", "x"), -0.25);
  EXPECT_THROW(parse_real("1.5abc", "x"), DataError);
  EXPECT_EQ(parse_integer("42", "n"), 42);
  EXPECT_THROW(parse_integer("4.2", "n"), DataError);
}

TEST(Stats, MedianAndQuantiles) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
  const std::vector<double> s{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(sorted_quantile(s, 0.75), 4.0);
}

TEST(Errors, CarryExitCodes) {
  EXPECT_EQ(ArgumentError("x").code(), ExitCode::usage);
  EXPECT_EQ(DataError("x").code(), ExitCode::data);
  EXPECT_EQ(LookupError("x").code(), ExitCode::data);
  EXPECT_EQ(NumericError("x").code(), ExitCode::numeric);
  const ParseError p("file.tsv", 12, "bad");
  EXPECT_NE(std::string(p.what()).find("file.tsv:12"), std::string::npos);
  EXPECT_EQ(p.line(), 12u);
}

TEST(Binning, PartitionsClosedInterval) {
  const BinningSpec b{0.1};
  ASSERT_EQ(b.count(), 20u);
  EXPECT_EQ(b.bin_of(-1.0), 0u);
  EXPECT_EQ(b.bin_of(1.0), 19u);
  EXPECT_EQ(b.bin_of(0.0), 10u);
  EXPECT_EQ(b.bin_of(-0.9), 1u);
  EXPECT_EQ(b.bin_of(0.95), 19u);
  EXPECT_NEAR(b.midpoint(0), -0.95, 1e-12);
  EXPECT_THROW(b.bin_of(1.0000001), ArgumentError);
  EXPECT_THROW(BinningSpec{0.3}.count(), ArgumentError);
  EXPECT_THROW(BinningSpec{0.0}.count(), ArgumentError);
  EXPECT_EQ(BinningSpec{2.0 / 3.0}.count(), 3u);
}
