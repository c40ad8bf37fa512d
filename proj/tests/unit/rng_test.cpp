#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cougar/rng.hpp"

using namespace cougar;

TEST(Rng, SameSeedAndStreamRepeat) {
  Rng a(42, Stream::overlay), b(42, Stream::overlay);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, StreamsAreIndependentSequences) {
  Rng a(42, Stream::overlay), b(42, Stream::failures), c(43, Stream::overlay);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    auto x = a.next();
    same_ab += x == b.next();
    same_ac += x == c.next();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Rng, NamedStreamMatchesLabel) {
  Rng a(7, Stream::mining), b(7, stream_name(Stream::mining));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, BelowIsUniform) {
  Rng rng(1, "below");
  const int k = 6, draws = 60000;
  std::vector<int> counts(k);
  for (int i = 0; i < draws; ++i) ++counts[rng.below(k)];
  double chi2 = 0, expected = static_cast<double>(draws) / k;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 20.52);  // df = 5, p = 0.001
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(Rng, UnitAndExponentialMoments) {
  Rng rng(2, "moments");
  const int n = 200000;
  double su = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    double u = rng.unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    double e = rng.exponential();
    ASSERT_GE(e, 0.0);
    se += e;
  }
  EXPECT_NEAR(su / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(se / n, 1.0, 5 * std::sqrt(1.0 / n));
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(3, "shuffle");
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  rng.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_NE(v, sorted);
}
