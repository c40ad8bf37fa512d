#include <gtest/gtest.h>

#include <map>
#include <set>

#include "cougar/kademlia.hpp"

using namespace cougar;

namespace {

std::vector<std::uint64_t> full_space(int width) {
  std::vector<std::uint64_t> ids(std::size_t{1} << width);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

TEST(Kademlia, BucketIndexIsHighestDifferingBit) {
  EXPECT_EQ(bucket_index(5, 5), -1);
  EXPECT_EQ(bucket_index(0b000, 0b001), 0);
  EXPECT_EQ(bucket_index(0b000, 0b011), 1);
  EXPECT_EQ(bucket_index(0b110, 0b010), 2);
  EXPECT_EQ(kademlia_width(8), 6);
  EXPECT_EQ(kademlia_width(1000), 13);
  EXPECT_EQ(kademlia_width(1024), 13);
  EXPECT_EQ(kademlia_width(1025), 14);
}

TEST(Kademlia, EightNodeBucketsMatchEnumeration) {
  const int width = 3;
  auto ids = full_space(width);
  Rng rng(1, Stream::overlay);
  auto st = build_kademlia(ids, width, 20, rng);
  for (std::uint64_t x = 0; x < 8; ++x) {
    for (int i = 0; i < width; ++i) {
      std::set<std::uint64_t> expected;
      for (std::uint64_t y = 0; y < 8; ++y)
        if (y != x && (x ^ y) >> i == 1) expected.insert(y);
      std::set<std::uint64_t> got;
      for (NodeId p : st[x].buckets[i]) got.insert(ids[p]);
      EXPECT_EQ(got, expected) << "node " << x << " bucket " << i;
    }
  }
}

// Replays the recursive broadcast and records how often and at which depth
// every node is reached.
struct Reach {
  std::map<NodeId, int> count;
  int max_depth = 0;
};

Reach broadcast(const std::vector<KademliaState>& st, NodeId origin, std::uint64_t seed, std::size_t fanout = 1) {
  Rng rng(seed, "broadcast");
  Reach r;
  std::vector<std::pair<BroadcastTarget, int>> stack{{{origin, st[origin].width}, 0}};
  r.count[origin] = 1;
  while (!stack.empty()) {
    auto [t, depth] = stack.back();
    stack.pop_back();
    r.max_depth = std::max(r.max_depth, depth);
    for (const auto& c : kad_broadcast_targets(st[t.peer], t.child_height, rng, fanout)) {
      ++r.count[c.peer];
      stack.push_back({c, depth + 1});
    }
  }
  return r;
}

TEST(Kademlia, EightNodeBroadcastReachesAllOnceWithinThreeHops) {
  const int width = 3;
  auto ids = full_space(width);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed, Stream::overlay);
    auto st = build_kademlia(ids, width, 20, rng);
    for (NodeId origin = 0; origin < 8; ++origin) {
      auto first = kad_broadcast_targets(st[origin], width, rng);
      EXPECT_LE(first.size(), 3u);
      auto r = broadcast(st, origin, seed);
      ASSERT_EQ(r.count.size(), 8u);
      for (auto [node, c] : r.count) EXPECT_EQ(c, 1) << "node " << node;
      EXPECT_LE(r.max_depth, 3);
    }
  }
}

TEST(Kademlia, FullSpaceCoverageWithinWidthHops) {
  const int width = 6;
  auto ids = full_space(width);
  Rng rng(5, Stream::overlay);
  auto st = build_kademlia(ids, width, 4, rng);
  for (NodeId origin : {0u, 17u, 63u}) {
    auto r = broadcast(st, origin, origin);
    ASSERT_EQ(r.count.size(), ids.size());
    for (auto [node, c] : r.count) EXPECT_EQ(c, 1);
    EXPECT_LE(r.max_depth, width);
  }
}

TEST(Kademlia, RandomIdsStillCoverEveryNode) {
  const std::size_t n = 1000;
  const int width = kademlia_width(n);
  Rng rng(7, Stream::overlay);
  auto ids = assign_kademlia_ids(n, width, rng);
  std::set<std::uint64_t> distinct(ids.begin(), ids.end());
  EXPECT_EQ(distinct.size(), n);
  for (auto id : ids) EXPECT_LT(id, std::uint64_t{1} << width);
  auto st = build_kademlia(ids, width, 20, rng);
  for (const auto& s : st)
    for (const auto& b : s.buckets) EXPECT_LE(b.size(), 20u);
  auto r = broadcast(st, 0, 1);
  EXPECT_EQ(r.count.size(), n);
  for (auto [node, c] : r.count) EXPECT_EQ(c, 1);
  auto r3 = broadcast(st, 0, 1, 3);
  EXPECT_EQ(r3.count.size(), n);
}

TEST(Kademlia, LeafAndSingletonHaveNoTargets) {
  auto ids = full_space(3);
  Rng rng(1, Stream::overlay);
  auto st = build_kademlia(ids, 3, 20, rng);
  EXPECT_TRUE(kad_broadcast_targets(st[0], 0, rng).empty());
  EXPECT_THROW(kad_broadcast_targets(st[0], 4, rng), std::invalid_argument);

  auto single = build_kademlia({0}, 3, 20, rng);
  EXPECT_TRUE(kad_broadcast_targets(single[0], 3, rng).empty());
}

}  // namespace
