#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cougar/overlay.hpp"

namespace cougar {

struct PerigeeParams {
  std::size_t outgoing = 8;
  std::size_t incoming_cap = 20;
  std::size_t replace_per_round = 2;
  double percentile = 90;
  Duration never_delivered_penalty = std::chrono::hours(1);
};

// Score-based neighbor selection. During a round each node records, per
// block, when each neighbor announced it; at the end of the round
// the worst-scoring outgoing neighbors are swapped for fresh PSS samples.
class PerigeeOverlay {
 public:
  PerigeeOverlay(std::size_t n, const PerigeeParams& params, Rng& rng);

  NeighborTable& table() { return table_; }
  const NeighborTable& table() const { return table_; }
  const PerigeeParams& params() const { return params_; }

  // Per-block observation window. begin_block resets the per-node earliest
  // arrival; record stores one neighbor's announcement.
  void begin_block();
  void record(NodeId node, NodeId from, SimTime at);
  void end_block(NodeId miner);

  struct RecalibrationStats {
    std::size_t replaced = 0;
    std::size_t replaced_established = 0;  // dropped neighbors that survived at least one earlier round
    std::vector<std::string> warnings;
  };

  RecalibrationStats recalibrate_all(PeerSampler& pss, Rng& rng);

  // Score of one outgoing neighbor over the current round.
  Duration score(NodeId node, NodeId neighbor) const;

  std::size_t rounds() const { return round_; }

 private:
  struct Tracked {
    NodeId neighbor;
    std::size_t added_round;
    std::vector<Duration> delays;
    std::size_t missing = 0;
  };
  struct NodeState {
    std::vector<Tracked> tracked;  // one entry per outgoing neighbor
    std::vector<std::pair<NodeId, SimTime>> arrivals;
  };

  void sync_tracked(NodeId node);

  PerigeeParams params_;
  NeighborTable table_;
  std::vector<NodeState> state_;
  std::size_t round_ = 0;
};

// Single-node form used by tests: scores each outgoing neighbor, replaces the
// `replace` worst (uniform tie-break) with PSS samples. Returns replaced peers.
std::vector<NodeId> perigee_recalibrate(NodeId node, NeighborTable& table,
                                        const std::vector<std::pair<NodeId, Duration>>& scores, std::size_t replace,
                                        PeerSampler& pss, Rng& rng, std::optional<std::string>* warning = nullptr);

// Nearest-rank percentile of samples, with `missing` never-delivered blocks
// counted at the penalty value.
Duration percentile_score(std::vector<Duration> delays, std::size_t missing, double percentile, Duration penalty);

}  // namespace cougar
