#include "cougar/overlay.hpp"

#include <algorithm>
#include <numeric>

namespace cougar {

namespace {

bool contains(const std::vector<NodeId>& v, NodeId x) { return std::find(v.begin(), v.end(), x) != v.end(); }

bool erase_value(std::vector<NodeId>& v, NodeId x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it == v.end()) return false;
  v.erase(it);
  return true;
}

}  // namespace

NeighborTable::NeighborTable(std::size_t n, std::size_t default_degree_limit) : nodes_(n) {
  for (auto& e : nodes_) e.degree_limit = default_degree_limit;
}

bool NeighborTable::linked(NodeId u, NodeId v) const {
  const auto& e = nodes_[u];
  return contains(e.close, v) || contains(e.random, v) || contains(e.incoming, v);
}

std::optional<LinkKind> NeighborTable::kind(NodeId u, NodeId v) const {
  const auto& e = nodes_[u];
  if (contains(e.close, v)) return LinkKind::close;
  if (contains(e.random, v)) return LinkKind::random;
  if (contains(e.incoming, v)) return LinkKind::incoming;
  return std::nullopt;
}

ConnectResult NeighborTable::try_connect(NodeId u, NodeId v, LinkKind as) {
  if (u == v) throw std::invalid_argument("try_connect: self link");
  if (as == LinkKind::incoming) throw std::invalid_argument("try_connect: outgoing link class required");
  if (linked(u, v)) throw std::invalid_argument("try_connect: duplicate link");
  if (degree(v) >= nodes_[v].degree_limit || degree(u) >= nodes_[u].degree_limit) return ConnectResult::refused;
  (as == LinkKind::close ? nodes_[u].close : nodes_[u].random).push_back(v);
  nodes_[v].incoming.push_back(u);
  return ConnectResult::accepted;
}

void NeighborTable::disconnect(NodeId u, NodeId v) {
  if (!erase_value(nodes_[u].close, v) && !erase_value(nodes_[u].random, v))
    throw std::invalid_argument("disconnect: no outgoing link");
  erase_value(nodes_[v].incoming, u);
}

void NeighborTable::reclassify(NodeId u, NodeId v, LinkKind as) {
  if (as == LinkKind::incoming) throw std::invalid_argument("reclassify: outgoing link class required");
  auto& e = nodes_[u];
  if (!erase_value(e.close, v) && !erase_value(e.random, v)) throw std::invalid_argument("reclassify: no outgoing link");
  (as == LinkKind::close ? e.close : e.random).push_back(v);
}

std::vector<NodeId> NeighborTable::neighbors(NodeId v) const {
  std::vector<NodeId> out;
  out.reserve(degree(v));
  for_each_neighbor(v, [&](NodeId x) { out.push_back(x); });
  return out;
}

void NeighborTable::check_invariants() const {
  for (NodeId u = 0; u < nodes_.size(); ++u) {
    const auto& e = nodes_[u];
    if (degree(u) > e.degree_limit) throw std::logic_error("node " + std::to_string(u) + " exceeds its degree limit");
    std::vector<NodeId> all = neighbors(u);
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw std::logic_error("node " + std::to_string(u) + " has overlapping neighbor sets");
    if (std::binary_search(all.begin(), all.end(), u)) throw std::logic_error("node " + std::to_string(u) + " links to itself");
    for (NodeId v : e.close)
      if (!contains(nodes_[v].incoming, u)) throw std::logic_error("link " + std::to_string(u) + "->" + std::to_string(v) + " is one-sided");
    for (NodeId v : e.random)
      if (!contains(nodes_[v].incoming, u)) throw std::logic_error("link " + std::to_string(u) + "->" + std::to_string(v) + " is one-sided");
    for (NodeId v : e.incoming)
      if (!contains(nodes_[v].close, u) && !contains(nodes_[v].random, u))
        throw std::logic_error("incoming " + std::to_string(v) + "->" + std::to_string(u) + " is one-sided");
  }
}

std::optional<NodeId> PeerSampler::sample(NodeId caller, const NeighborTable& table,
                                          const std::vector<NodeId>& extra_exclude) {
  const std::size_t n = alive_.size();
  auto eligible = [&](NodeId x) {
    return x != caller && alive_[x] && !table.linked(caller, x) && !contains(extra_exclude, x);
  };
  // Rejection sampling is uniform over the eligible set; fall back to an
  // explicit scan when the eligible set is sparse.
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto x = static_cast<NodeId>(rng_->below(n));
    if (eligible(x)) return x;
  }
  std::vector<NodeId> pool;
  for (NodeId x = 0; x < n; ++x)
    if (eligible(x)) pool.push_back(x);
  if (pool.empty()) return std::nullopt;
  return pool[rng_->below(pool.size())];
}

Duration measure_rtt(NodeId u, NodeId v, const NodeTopology& topology, const RttProbe& probe, Rng& rng) {
  Duration truth = topology.rtt(u, v);
  if (probe.noise <= 0) return truth;
  const int pings = std::max(1, probe.pings);
  double sum = 0;
  for (int i = 0; i < pings; ++i)
    sum += static_cast<double>(truth.count()) * (1.0 + rng.uniform(-probe.noise, probe.noise));
  return Duration{std::llround(sum / pings)};
}

RejuvenationOutcome rejuvenate(NodeId v, NeighborTable& table, const NodeTopology& topology, PeerSampler& pss,
                               const RejuvenationParams& params, Rng& rng) {
  RejuvenationOutcome out;
  struct Candidate {
    NodeId peer;
    Duration rtt;
    std::uint64_t tie;
    bool linked;
  };
  std::vector<Candidate> pool;
  for (NodeId x : table.close(v)) pool.push_back({x, measure_rtt(v, x, topology, params.probe, rng), rng.next(), true});
  for (NodeId x : table.random(v)) pool.push_back({x, measure_rtt(v, x, topology, params.probe, rng), rng.next(), true});

  std::vector<NodeId> probed;
  for (std::size_t i = 0; i < params.probes; ++i) {
    auto x = pss.sample(v, table, probed);
    if (!x) break;
    probed.push_back(*x);
    pool.push_back({*x, measure_rtt(v, *x, topology, params.probe, rng), rng.next(), false});
  }

  // Dropping the highest RTT one at a time with a uniform tie-break keeps the
  // same members as a sort by (rtt, random key).
  std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.rtt != b.rtt) return a.rtt < b.rtt;
    return a.tie < b.tie;
  });

  for (std::size_t i = params.close; i < pool.size(); ++i) {
    if (pool[i].linked) {
      table.disconnect(v, pool[i].peer);
      out.dropped.push_back(pool[i].peer);
    }
  }
  pool.resize(std::min(pool.size(), params.close));
  for (const auto& c : pool) {
    if (c.linked) {
      if (table.kind(v, c.peer) != LinkKind::close) table.reclassify(v, c.peer, LinkKind::close);
    } else if (table.try_connect(v, c.peer, LinkKind::close) == ConnectResult::refused) {
      ++out.refused;
    }
  }

  const std::size_t target = params.close + params.random;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 16 * (target + 1) + 64;
  while (table.outgoing_count(v) < target && attempts++ < max_attempts) {
    auto x = pss.sample(v, table);
    if (!x) break;
    if (!pss.responsive(*x, table) || table.try_connect(v, *x, LinkKind::random) == ConnectResult::refused) ++out.refused;
  }
  if (table.outgoing_count(v) < target)
    out.warning = "node " + std::to_string(v) + ": only " + std::to_string(table.outgoing_count(v)) + " of " +
                  std::to_string(target) + " outgoing links could be placed";
  return out;
}

NeighborTable build_random_overlay(std::size_t n, std::size_t degree_out, std::size_t degree_limit, Rng& rng,
                                   BuildWarnings* warnings) {
  if (n < degree_out + 1) throw std::invalid_argument("random overlay: population smaller than degree_out + 1");
  NeighborTable table(n, degree_limit);
  for (NodeId u = 0; u < n; ++u) {
    std::size_t attempts = 0;
    while (table.outgoing_count(u) < degree_out && attempts++ < 64 * degree_out + 64) {
      auto v = static_cast<NodeId>(rng.below(n));
      if (v == u || table.linked(u, v)) continue;
      table.try_connect(u, v, LinkKind::random);
    }
    if (table.outgoing_count(u) < degree_out && warnings)
      warnings->messages.push_back("node " + std::to_string(u) + ": random overlay short of outgoing links");
  }
  return table;
}

NeighborTable build_geographic_overlay(const NodeTopology& topology, std::size_t degree_out,
                                       std::size_t degree_limit, Rng& rng, BuildWarnings* warnings) {
  const std::size_t n = topology.size();
  if (n < degree_out + 1) throw std::invalid_argument("geographic overlay: population smaller than degree_out + 1");
  std::vector<std::vector<NodeId>> by_continent(kContinentCount);
  for (NodeId v = 0; v < n; ++v) by_continent[static_cast<int>(topology.continent_of(v))].push_back(v);

  NeighborTable table(n, degree_limit);
  const std::size_t same_quota = degree_out / 2;
  bool warned_short_continent = false;

  // Uniform pick from a candidate list, resampling refused or already-linked
  // peers, bounded by a scan fallback.
  auto pick_from = [&](NodeId u, auto&& is_candidate, std::size_t list_size, auto&& at) -> bool {
    if (list_size == 0) return false;
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeId v = at(rng.below(list_size));
      if (!is_candidate(v) || v == u || table.linked(u, v)) continue;
      if (table.try_connect(u, v, LinkKind::random) == ConnectResult::accepted) return true;
    }
    std::vector<NodeId> pool;
    for (std::size_t i = 0; i < list_size; ++i) {
      NodeId v = at(i);
      if (is_candidate(v) && v != u && !table.linked(u, v) && table.degree(v) < table.degree_limit(v)) pool.push_back(v);
    }
    if (pool.empty()) return false;
    return table.try_connect(u, pool[rng.below(pool.size())], LinkKind::random) == ConnectResult::accepted;
  };

  for (NodeId u = 0; u < n; ++u) {
    const int home = static_cast<int>(topology.continent_of(u));
    const auto& local = by_continent[home];
    auto any = [](NodeId) { return true; };
    auto foreign = [&](NodeId v) { return static_cast<int>(topology.continent_of(v)) != home; };
    auto local_at = [&](std::size_t i) { return local[i]; };
    auto all_at = [](std::size_t i) { return static_cast<NodeId>(i); };

    std::size_t same = 0, other = 0;
    while (same < same_quota && pick_from(u, any, local.size(), local_at)) ++same;
    while (other < degree_out - same_quota && pick_from(u, foreign, n, all_at)) ++other;
    // Shortfalls: fill from whichever side still has room.
    std::size_t shortfall = degree_out - same - other;
    if (shortfall > 0 && !warned_short_continent && warnings) {
      warnings->messages.push_back("geographic overlay: continent '" + std::string(continent_name(static_cast<Continent>(home))) +
                                   "' cannot supply the same/other split, filling from the other side");
      warned_short_continent = true;
    }
    while (shortfall > 0 && pick_from(u, foreign, n, all_at)) --shortfall;
    while (shortfall > 0 && pick_from(u, any, local.size(), local_at)) --shortfall;
    if (shortfall > 0 && warnings)
      warnings->messages.push_back("node " + std::to_string(u) + ": geographic overlay short of outgoing links");
  }
  return table;
}

ComponentStats connected_components(const NeighborTable& table) {
  ComponentStats st;
  const std::size_t n = table.size();
  constexpr auto unset = static_cast<std::uint32_t>(-1);
  st.label.assign(n, unset);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (st.label[s] != unset) continue;
    auto id = static_cast<std::uint32_t>(st.components++);
    std::size_t size = 0;
    stack.push_back(s);
    st.label[s] = id;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      ++size;
      table.for_each_neighbor(u, [&](NodeId v) {
        if (st.label[v] == unset) {
          st.label[v] = id;
          stack.push_back(v);
        }
      });
    }
    st.largest = std::max(st.largest, size);
  }
  return st;
}

}  // namespace cougar
