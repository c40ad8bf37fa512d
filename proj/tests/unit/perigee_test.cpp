#include <gtest/gtest.h>

#include <map>

#include "cougar/perigee.hpp"

using namespace cougar;
using std::chrono::milliseconds;

namespace {

NeighborTable node_with_eight(std::size_t n) {
  NeighborTable t(n, 28);
  for (NodeId x = 1; x <= 8; ++x) t.try_connect(0, x, LinkKind::random);
  return t;
}

TEST(PercentileScore, NearestRank) {
  std::vector<Duration> d;
  for (int i = 10; i >= 1; --i) d.push_back(milliseconds(i));
  EXPECT_EQ(percentile_score(d, 0, 90, std::chrono::hours(1)), milliseconds(9));
  EXPECT_EQ(percentile_score(d, 0, 100, std::chrono::hours(1)), milliseconds(10));
  EXPECT_EQ(percentile_score(d, 2, 90, std::chrono::hours(1)), std::chrono::hours(1));
  EXPECT_EQ(percentile_score({}, 0, 90, std::chrono::hours(1)), Duration::zero());
}

TEST(PerigeeRecalibrate, WorstPairReplaced) {
  auto t = node_with_eight(40);
  std::vector<std::pair<NodeId, Duration>> scores;
  for (NodeId x = 1; x <= 6; ++x) scores.emplace_back(x, milliseconds(x));
  scores.emplace_back(7, std::chrono::hours(1));
  scores.emplace_back(8, std::chrono::hours(1));
  Rng rng(1, Stream::overlay);
  PeerSampler pss(40, rng);
  auto dropped = perigee_recalibrate(0, t, scores, 2, pss, rng);
  std::sort(dropped.begin(), dropped.end());
  EXPECT_EQ(dropped, (std::vector<NodeId>{7, 8}));
  EXPECT_EQ(t.outgoing_count(0), 8u);
  EXPECT_FALSE(t.linked(0, 7));
  EXPECT_FALSE(t.linked(0, 8));
  t.check_invariants();
}

TEST(PerigeeRecalibrate, EqualScoresTieBreakUniformly) {
  std::map<NodeId, int> freq;
  const int runs = 8000;
  for (int s = 0; s < runs; ++s) {
    auto t = node_with_eight(40);
    std::vector<std::pair<NodeId, Duration>> scores;
    for (NodeId x = 1; x <= 8; ++x) scores.emplace_back(x, milliseconds(5));
    Rng rng(static_cast<std::uint64_t>(s), Stream::overlay);
    PeerSampler pss(40, rng);
    for (NodeId d : perigee_recalibrate(0, t, scores, 2, pss, rng)) ++freq[d];
  }
  const double e = runs * 2.0 / 8;
  double chi2 = 0;
  for (NodeId x = 1; x <= 8; ++x) chi2 += (freq[x] - e) * (freq[x] - e) / e;
  EXPECT_LT(chi2, 24.32);  // df = 7, p = 0.001
}

TEST(PerigeeRecalibrate, TooFewOutgoingIsNoOp) {
  NeighborTable t(10, 28);
  t.try_connect(0, 1, LinkKind::random);
  Rng rng(1, Stream::overlay);
  PeerSampler pss(10, rng);
  std::optional<std::string> warning;
  auto dropped = perigee_recalibrate(0, t, {{1, milliseconds(1)}}, 2, pss, rng, &warning);
  EXPECT_TRUE(dropped.empty());
  EXPECT_TRUE(warning.has_value());
  EXPECT_TRUE(t.linked(0, 1));
}

TEST(PerigeeOverlay, ScoresRelativeToEarliestArrival) {
  PerigeeParams p;
  Rng rng(3, Stream::overlay);
  PerigeeOverlay ov(100, p, rng);
  const std::vector<NodeId> out = ov.table().random(5);
  ASSERT_EQ(out.size(), 8u);
  ov.begin_block();
  const SimTime t0 = kTimeZero + milliseconds(100);
  for (std::size_t i = 0; i + 1 < out.size(); ++i) ov.record(5, out[i], t0 + milliseconds(10 * i));
  ov.end_block(0);
  EXPECT_EQ(ov.score(5, out[0]), Duration::zero());
  EXPECT_EQ(ov.score(5, out[3]), milliseconds(30));
  EXPECT_EQ(ov.score(5, out[7]), p.never_delivered_penalty);

  PeerSampler pss(100, rng);
  auto stats = ov.recalibrate_all(pss, rng);
  EXPECT_EQ(ov.rounds(), 1u);
  EXPECT_FALSE(ov.table().linked(5, out[7]));
  EXPECT_GT(stats.replaced, 0u);
  ov.table().check_invariants();
  for (NodeId v = 0; v < 100; ++v) EXPECT_LE(ov.table().degree(v), 28u);
}

}  // namespace
