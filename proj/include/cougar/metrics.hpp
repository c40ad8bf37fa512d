#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cougar/config.hpp"
#include "cougar/dissemination.hpp"
#include "cougar/latency.hpp"
#include "cougar/rng.hpp"

namespace cougar {

// Per-node probability of producing the next block, normalized to sum 1.
class MiningPowerDistribution {
 public:
  explicit MiningPowerDistribution(std::vector<double> weights, MiningKind kind = MiningKind::uniform);

  static MiningPowerDistribution uniform(std::size_t n);
  // i.i.d. Exp(1) draws, normalized.
  static MiningPowerDistribution exponential(std::size_t n, Rng& rng);

  NodeId pick(Rng& rng) const;
  const std::vector<double>& weights() const { return weights_; }
  MiningKind kind() const { return kind_; }

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  MiningKind kind_;
};

NodeId pick_miner(const MiningPowerDistribution& dist, Rng& rng);

inline constexpr std::int64_t kUnreached = -1;

// Outcome of one block; all times in ns relative to block creation.
struct BlockResult {
  std::uint32_t id = 0;
  NodeId miner = 0;
  std::vector<std::int64_t> first_header_ns;
  std::vector<std::int64_t> body_received_ns;
  std::vector<std::int64_t> validated_ns;
  std::vector<std::uint32_t> redundant;
  std::vector<std::uint32_t> responder_rank;
  std::vector<std::uint32_t> degree;  // links per node while the block was live; empty for Kademlia
};

enum class Weighting : std::uint8_t { nodes, mining_power };

struct OverlayStats {
  std::size_t components = 0;
  std::size_t largest_component = 0;
  double mean_degree = 0;
  std::size_t max_degree = 0;
};

struct NodeSnapshot {
  NodeId id;
  std::string server;
  std::vector<NodeId> close;
  std::vector<NodeId> random;
  std::vector<NodeId> incoming;
};

struct MetricsReport {
  std::string protocol;
  std::string effective_config;
  std::vector<std::pair<std::string, std::string>> config_entries;
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  MiningKind mining = MiningKind::uniform;
  std::vector<double> mining_weights;
  std::vector<BlockResult> blocks;
  std::vector<BlockResult> optimal;  // theoretic single-hop lower bound, same miners
  MessageCounts counts;
  OverlayStats overlay;
  std::vector<NodeSnapshot> snapshot;
  std::vector<std::string> warnings;
  std::vector<std::size_t> perigee_established_churn;  // per recalibration round, warmup included
};

// Earliest time by which at least q percent of the weight has validated the
// block; nullopt when the block never gets there.
std::optional<Duration> block_reach_time(const BlockResult& block, const std::vector<double>& weights, double q);

// Mean of block_reach_time over blocks; nullopt ("not reached") if any block
// falls short. q must lie in (0, 100].
std::optional<Duration> dissemination_percentile(const MetricsReport& report, double q, Weighting weighting);
std::optional<Duration> optimal_percentile(const MetricsReport& report, double q, Weighting weighting);

std::vector<double> weights_for(const MetricsReport& report, Weighting weighting);

struct CurvePoint {
  Duration t;
  double fraction_uninformed;
};

// Fraction of weight not yet validated, averaged over blocks, sampled every
// `bucket` from 0 until every reachable node has validated.
std::vector<CurvePoint> uninformed_curve(const MetricsReport& report, Weighting weighting,
                                         Duration bucket = std::chrono::milliseconds(5));

// Deliveries (validated non-miner nodes) keyed by redundant body count.
std::map<std::uint32_t, std::uint64_t> redundancy_histogram(const MetricsReport& report);
// Deliveries keyed by the 1-based pull rank of the first body.
std::map<std::uint32_t, std::uint64_t> responder_rank_histogram(const MetricsReport& report);

double coverage(const MetricsReport& report);

// Every node receives each block straight from its miner: one full
// header/pull/body transfer plus local header and body validation.
std::vector<BlockResult> theoretic_optimal(const NodeTopology& topology, const std::vector<NodeId>& miners,
                                           const ScenarioConfig& config);

}  // namespace cougar
