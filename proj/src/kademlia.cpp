#include "cougar/kademlia.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_set>

namespace cougar {

int bucket_index(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ b;
  if (x == 0) return -1;
  return 63 - std::countl_zero(x);
}

int kademlia_width(std::size_t n) {
  int bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits + 3;
}

std::vector<std::uint64_t> assign_kademlia_ids(std::size_t n, int width, Rng& rng) {
  if (width < 1 || width > 63) throw std::invalid_argument("kademlia: id width must be in [1, 63]");
  const std::uint64_t space = std::uint64_t{1} << width;
  if (n > space) throw std::invalid_argument("kademlia: id space smaller than population");
  std::unordered_set<std::uint64_t> used;
  std::vector<std::uint64_t> ids;
  ids.reserve(n);
  while (ids.size() < n) {
    std::uint64_t id = rng.below(space);
    if (used.insert(id).second) ids.push_back(id);
  }
  return ids;
}

namespace {

// k distinct indices from [0, m), uniformly (Floyd), sorted.
std::vector<std::size_t> choose_indices(std::size_t m, std::size_t k, Rng& rng) {
  std::vector<std::size_t> out;
  if (k == 1 && m > 1) return {static_cast<std::size_t>(rng.below(m))};
  if (k >= m) {
    out.resize(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = i;
    return out;
  }
  std::unordered_set<std::size_t> picked;
  for (std::size_t j = m - k; j < m; ++j) {
    std::size_t t = rng.below(j + 1);
    if (!picked.insert(t).second) picked.insert(j);
  }
  out.assign(picked.begin(), picked.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<KademliaState> build_kademlia(const std::vector<std::uint64_t>& ids, int width, std::size_t bucket_size,
                                          Rng& rng) {
  const std::size_t n = ids.size();
  std::vector<std::pair<std::uint64_t, NodeId>> sorted(n);
  for (NodeId v = 0; v < n; ++v) sorted[v] = {ids[v], v};
  std::sort(sorted.begin(), sorted.end());

  std::vector<KademliaState> states(n);
  for (NodeId v = 0; v < n; ++v) {
    auto& st = states[v];
    st.id = ids[v];
    st.width = width;
    st.buckets.resize(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) {
      std::uint64_t lo = ((st.id >> i) ^ 1) << i;
      std::uint64_t hi = lo + (std::uint64_t{1} << i);
      auto first = std::lower_bound(sorted.begin(), sorted.end(), std::pair{lo, NodeId{0}});
      auto last = std::lower_bound(sorted.begin(), sorted.end(), std::pair{hi, NodeId{0}});
      auto m = static_cast<std::size_t>(last - first);
      auto& bucket = st.buckets[static_cast<std::size_t>(i)];
      for (std::size_t idx : choose_indices(m, bucket_size, rng)) bucket.push_back(first[static_cast<std::ptrdiff_t>(idx)].second);
    }
  }
  return states;
}

std::vector<BroadcastTarget> kad_broadcast_targets(const KademliaState& state, int height, Rng& rng,
                                                   std::size_t fanout) {
  if (height < 0 || height > state.width) throw std::invalid_argument("kad_broadcast_targets: height out of range");
  std::vector<BroadcastTarget> out;
  for (int i = height - 1; i >= 0; --i) {
    const auto& bucket = state.buckets[static_cast<std::size_t>(i)];
    if (bucket.empty()) continue;
    for (std::size_t idx : choose_indices(bucket.size(), fanout, rng)) out.push_back({bucket[idx], i});
  }
  return out;
}

}  // namespace cougar
