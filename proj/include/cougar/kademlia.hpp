#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cougar/latency.hpp"
#include "cougar/rng.hpp"

namespace cougar {

// Routing state of one node in a Kademlia id space of `width` bits. Bucket i
// holds peers whose highest differing id bit is i, i.e. XOR distance in
// [2^i, 2^(i+1)). Bucket width-1 covers the far half of the space.
struct KademliaState {
  std::uint64_t id = 0;
  int width = 0;
  std::vector<std::vector<NodeId>> buckets;
};

int bucket_index(std::uint64_t a, std::uint64_t b);  // -1 when a == b

int kademlia_width(std::size_t n);  // ceil(log2 n) + 3

// Distinct ids drawn uniformly from [0, 2^width).
std::vector<std::uint64_t> assign_kademlia_ids(std::size_t n, int width, Rng& rng);

// Builds every node's buckets from global knowledge; each bucket keeps up to
// bucket_size members chosen uniformly from the matching id range.
std::vector<KademliaState> build_kademlia(const std::vector<std::uint64_t>& ids, int width, std::size_t bucket_size,
                                          Rng& rng);

struct BroadcastTarget {
  NodeId peer;
  int child_height;
  bool operator==(const BroadcastTarget&) const = default;
};

// Structured broadcast step: `fanout` uniformly chosen peers from each
// non-empty bucket below `height`, each paired with the bucket index as its
// own height. The originator uses height == width; height 0 is a leaf.
std::vector<BroadcastTarget> kad_broadcast_targets(const KademliaState& state, int height, Rng& rng,
                                                   std::size_t fanout = 1);

}  // namespace cougar
