#include "seedex/rng.hpp"
#include "seedex/text.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <vector>

using namespace seedex;

TEST(Text, CasefoldHandlesFrenchCapitals) {
  EXPECT_EQ(text::casefold("ÉCOLE Œuvre ÇA"), "école œuvre ça");
  EXPECT_EQ(text::casefold("déjà"), "déjà");
}

TEST(Text, Utf8LengthCountsCodePoints) {
  EXPECT_EQ(text::utf8_length("été"), 3u);
  EXPECT_EQ(text::utf8_length(""), 0u);
  EXPECT_EQ(text::utf8_length("«»"), 2u);
}

TEST(Text, FormatG17RoundTrips) {
  RandomStream rng(99, "g17");
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.below(40)) - 20);
    EXPECT_EQ(std::strtod(text::format_g17(v).c_str(), nullptr), v);
  }
}

TEST(Text, Sha256KnownVectors) {
  EXPECT_EQ(text::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(text::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Text, CsvFieldQuotesOnlyWhenNeeded) {
  EXPECT_EQ(text::csv_field("plain"), "plain");
  EXPECT_EQ(text::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(text::csv_field("dit \"oui\""), "\"dit \"\"oui\"\"\"");
}

TEST(Text, HtmlEscape) {
  EXPECT_EQ(text::html_escape("<a href=\"x\">&'"), "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
}

TEST(Rng, MatchesReferenceSplitMix64) {
  // First outputs of the reference SplitMix64 generator seeded with 0.
  RandomStream s(0);
  EXPECT_EQ(s.next_u64(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(s.next_u64(), 0x6e789e6aa1b965f4ULL);
}

TEST(Rng, StreamsAreDeterministicAndTagged) {
  RandomStream a(7, "init"), b(7, "init"), c(7, "order"), d(8, "init");
  const auto va = a.next_u64();
  EXPECT_EQ(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
  EXPECT_NE(va, d.next_u64());
}

TEST(Rng, BelowStaysInRangeAndUniformInUnitInterval) {
  RandomStream s(3, "range");
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = s.below(7);
    ASSERT_LT(v, 7u);
    ++hist[v];
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (int h : hist) EXPECT_NEAR(h, 1000, 150);
}

TEST(Rng, ShuffleIsAPermutation) {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  RandomStream s(11, "shuffle");
  s.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_NE(v, sorted);
}

TEST(Rng, NormalHasUnitMoments) {
  RandomStream s(5, "normal");
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}
