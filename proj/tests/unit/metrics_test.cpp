#include <gtest/gtest.h>

#include <cmath>

#include "cougar/metrics.hpp"
#include "fixtures.hpp"

using namespace cougar;
using std::chrono::milliseconds;

namespace {

MetricsReport four_nodes(std::vector<std::int64_t> validated_ms, std::vector<double> weights = {}) {
  MetricsReport r;
  r.nodes = validated_ms.size();
  BlockResult b;
  for (auto t : validated_ms) b.validated_ns.push_back(t < 0 ? kUnreached : t * 1'000'000);
  b.first_header_ns = b.body_received_ns = b.validated_ns;
  b.redundant.assign(r.nodes, 0);
  b.responder_rank.assign(r.nodes, 1);
  r.blocks.push_back(b);
  r.mining_weights = weights.empty() ? std::vector<double>(r.nodes, 1.0 / static_cast<double>(r.nodes)) : weights;
  return r;
}

TEST(Percentile, NodeWeightedMedian) {
  auto r = four_nodes({10, 20, 30, 40});
  EXPECT_EQ(dissemination_percentile(r, 50, Weighting::nodes), milliseconds(20));
  EXPECT_EQ(dissemination_percentile(r, 100, Weighting::nodes), milliseconds(40));
}

TEST(Percentile, MiningPowerWeighted) {
  auto r = four_nodes({10, 20, 30, 40}, {0.7, 0.1, 0.1, 0.1});
  EXPECT_EQ(dissemination_percentile(r, 50, Weighting::mining_power), milliseconds(10));
  EXPECT_EQ(dissemination_percentile(r, 80, Weighting::mining_power), milliseconds(20));
}

TEST(Percentile, NotReachedAboveCoverage) {
  std::vector<std::int64_t> t(20, 10);
  t[3] = t[11] = -1;
  auto r = four_nodes(t);
  EXPECT_FALSE(dissemination_percentile(r, 95, Weighting::nodes).has_value());
  EXPECT_EQ(dissemination_percentile(r, 90, Weighting::nodes), milliseconds(10));
  EXPECT_DOUBLE_EQ(coverage(r), 0.9);
}

TEST(Percentile, RangeChecked) {
  auto r = four_nodes({10, 20, 30, 40});
  EXPECT_THROW(dissemination_percentile(r, 0, Weighting::nodes), std::invalid_argument);
  EXPECT_THROW(dissemination_percentile(r, 100.5, Weighting::nodes), std::invalid_argument);
}

TEST(Percentile, AveragedOverBlocks) {
  auto r = four_nodes({10, 20, 30, 40});
  auto second = four_nodes({0, 40, 50, 60}).blocks[0];
  r.blocks.push_back(second);
  EXPECT_EQ(dissemination_percentile(r, 50, Weighting::nodes), milliseconds(30));
}

TEST(Percentile, UniformPowerMatchesNodeWeighting) {
  Rng rng(1, "times");
  std::vector<std::int64_t> t(97);
  for (auto& x : t) x = static_cast<std::int64_t>(rng.below(500));
  auto r = four_nodes(t);
  r.mining_weights = MiningPowerDistribution::uniform(97).weights();
  for (double q : {1.0, 33.3, 50.0, 90.0, 95.0, 99.0, 100.0})
    EXPECT_EQ(dissemination_percentile(r, q, Weighting::nodes), dissemination_percentile(r, q, Weighting::mining_power));
}

TEST(Curve, MonotoneAndComplete) {
  auto r = four_nodes({0, 12, 12, 31});
  auto c = uninformed_curve(r, Weighting::nodes);
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(c.front().t, Duration::zero());
  EXPECT_DOUBLE_EQ(c.front().fraction_uninformed, 0.75);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_LE(c[i].fraction_uninformed, c[i - 1].fraction_uninformed);
    EXPECT_EQ(c[i].t - c[i - 1].t, milliseconds(5));
  }
  EXPECT_DOUBLE_EQ(c.back().fraction_uninformed, 0.0);
  EXPECT_DOUBLE_EQ(c[3].fraction_uninformed, 0.25);  // t = 15ms
}

TEST(PickMiner, UniformFrequencies) {
  auto d = MiningPowerDistribution::uniform(4);
  Rng rng(1, Stream::mining);
  const int draws = 100000;
  std::vector<int> count(4);
  for (int i = 0; i < draws; ++i) ++count[pick_miner(d, rng)];
  const double sigma = std::sqrt(draws * 0.25 * 0.75);
  for (int c : count) EXPECT_NEAR(c, draws * 0.25, 3 * sigma);
}

TEST(PickMiner, SkewedFrequencies) {
  const std::vector<double> w = {0.9, 0.05, 0.03, 0.02};
  MiningPowerDistribution d(w, MiningKind::exponential);
  Rng rng(2, Stream::mining);
  const int draws = 100000;
  std::vector<int> count(4);
  for (int i = 0; i < draws; ++i) ++count[pick_miner(d, rng)];
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(count[i], draws * w[i], 3 * std::sqrt(draws * w[i] * (1 - w[i])));
}

TEST(PickMiner, SingleNodeAndZeroWeights) {
  MiningPowerDistribution one({1.0});
  Rng rng(3, Stream::mining);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(pick_miner(one, rng), 0u);
  MiningPowerDistribution gap({0, 1, 0});
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(pick_miner(gap, rng), 1u);
  EXPECT_THROW(MiningPowerDistribution({0.0, 0.0}), std::invalid_argument);
}

TEST(PickMiner, ExponentialWeightsNormalized) {
  Rng rng(4, Stream::mining);
  auto d = MiningPowerDistribution::exponential(1000, rng);
  double sum = 0;
  for (double w : d.weights()) {
    EXPECT_GT(w, 0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(TheoreticOptimal, SymmetricHundredMs) {
  auto topo = test::uniform_topology(5, 100);
  ScenarioConfig cfg;
  auto blocks = theoretic_optimal(topo, {2}, cfg);
  ASSERT_EQ(blocks.size(), 1u);
  for (NodeId v = 0; v < 5; ++v)
    EXPECT_EQ(Duration{blocks[0].validated_ns[v]}, v == 2 ? Duration::zero() : milliseconds(205));
}

TEST(TheoreticOptimal, CoLocatedNode) {
  auto trace = test::trace_ms({{1, 100}, {100, 1}});
  NodeTopology topo(trace, {0, 0});
  ScenarioConfig cfg;
  auto blocks = theoretic_optimal(topo, {0}, cfg);
  EXPECT_EQ(Duration{blocks[0].validated_ns[1]}, from_us(56'500));
}

TEST(Histograms, SkipMinerAndUnreached) {
  auto r = four_nodes({0, 10, 20, -1});
  r.blocks[0].miner = 0;
  r.blocks[0].redundant = {9, 0, 2, 5};
  r.blocks[0].responder_rank = {0, 1, 3, 0};
  auto red = redundancy_histogram(r);
  EXPECT_EQ(red.size(), 2u);
  EXPECT_EQ(red[0], 1u);
  EXPECT_EQ(red[2], 1u);
  auto rank = responder_rank_histogram(r);
  EXPECT_EQ(rank[1], 1u);
  EXPECT_EQ(rank[3], 1u);
}

}  // namespace
