#include "cougar/perigee.hpp"

#include <algorithm>
#include <cmath>

namespace cougar {

Duration percentile_score(std::vector<Duration> delays, std::size_t missing, double percentile, Duration penalty) {
  delays.insert(delays.end(), missing, penalty);
  if (delays.empty()) return Duration::zero();
  std::sort(delays.begin(), delays.end());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(delays.size())));
  rank = std::clamp<std::size_t>(rank, 1, delays.size());
  return delays[rank - 1];
}

std::vector<NodeId> perigee_recalibrate(NodeId node, NeighborTable& table,
                                        const std::vector<std::pair<NodeId, Duration>>& scores, std::size_t replace,
                                        PeerSampler& pss, Rng& rng, std::optional<std::string>* warning) {
  if (table.outgoing_count(node) < replace || scores.size() < replace) {
    if (warning) *warning = "node " + std::to_string(node) + ": too few outgoing neighbors to recalibrate";
    return {};
  }
  struct Ranked {
    NodeId peer;
    Duration score;
    std::uint64_t tie;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(scores.size());
  for (auto [peer, s] : scores) ranked.push_back({peer, s, rng.next()});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tie < b.tie;
  });

  std::vector<NodeId> dropped;
  for (std::size_t i = 0; i < replace; ++i) {
    table.disconnect(node, ranked[i].peer);
    dropped.push_back(ranked[i].peer);
  }
  std::size_t added = 0, attempts = 0;
  while (added < replace && attempts++ < 64 * replace + 64) {
    auto x = pss.sample(node, table, dropped);
    if (!x) break;
    if (pss.responsive(*x, table) && table.try_connect(node, *x, LinkKind::random) == ConnectResult::accepted) ++added;
  }
  if (added < replace && warning)
    *warning = "node " + std::to_string(node) + ": could not refill all replaced neighbors";
  return dropped;
}

PerigeeOverlay::PerigeeOverlay(std::size_t n, const PerigeeParams& params, Rng& rng)
    : params_(params),
      table_(build_random_overlay(n, params.outgoing, params.outgoing + params.incoming_cap, rng)),
      state_(n) {
  for (NodeId v = 0; v < n; ++v) sync_tracked(v);
}

void PerigeeOverlay::sync_tracked(NodeId node) {
  auto& st = state_[node];
  std::vector<Tracked> next;
  auto keep = [&](NodeId peer) {
    std::size_t added = round_;
    for (const auto& t : st.tracked)
      if (t.neighbor == peer) added = t.added_round;
    next.push_back(Tracked{peer, added, {}, 0});
  };
  for (NodeId x : table_.close(node)) keep(x);
  for (NodeId x : table_.random(node)) keep(x);
  st.tracked = std::move(next);
}

void PerigeeOverlay::begin_block() {
  for (auto& st : state_) st.arrivals.clear();
}

void PerigeeOverlay::record(NodeId node, NodeId from, SimTime at) { state_[node].arrivals.emplace_back(from, at); }

void PerigeeOverlay::end_block(NodeId miner) {
  for (NodeId v = 0; v < state_.size(); ++v) {
    auto& st = state_[v];
    if (v == miner || st.arrivals.empty()) continue;
    SimTime earliest = kNever;
    for (const auto& a : st.arrivals) earliest = std::min(earliest, a.second);
    for (auto& t : st.tracked) {
      auto it = std::find_if(st.arrivals.begin(), st.arrivals.end(), [&](const auto& a) { return a.first == t.neighbor; });
      if (it == st.arrivals.end())
        ++t.missing;
      else
        t.delays.push_back(it->second - earliest);
    }
    st.arrivals.clear();
  }
}

Duration PerigeeOverlay::score(NodeId node, NodeId neighbor) const {
  for (const auto& t : state_[node].tracked)
    if (t.neighbor == neighbor)
      return percentile_score(t.delays, t.missing, params_.percentile, params_.never_delivered_penalty);
  throw std::invalid_argument("perigee: not an outgoing neighbor");
}

PerigeeOverlay::RecalibrationStats PerigeeOverlay::recalibrate_all(PeerSampler& pss, Rng& rng) {
  RecalibrationStats stats;
  ++round_;
  for (NodeId v = 0; v < state_.size(); ++v) {
    std::vector<std::pair<NodeId, Duration>> scores;
    for (const auto& t : state_[v].tracked)
      scores.emplace_back(t.neighbor, percentile_score(t.delays, t.missing, params_.percentile, params_.never_delivered_penalty));
    std::optional<std::string> warning;
    auto dropped = perigee_recalibrate(v, table_, scores, params_.replace_per_round, pss, rng, &warning);
    if (warning) stats.warnings.push_back(*warning);
    stats.replaced += dropped.size();
    for (NodeId d : dropped)
      for (const auto& t : state_[v].tracked)
        if (t.neighbor == d && t.added_round + 1 < round_) ++stats.replaced_established;
  }
  for (NodeId v = 0; v < state_.size(); ++v) sync_tracked(v);
  return stats;
}

}  // namespace cougar
