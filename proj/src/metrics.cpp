#include "cougar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cougar {

MiningPowerDistribution::MiningPowerDistribution(std::vector<double> weights, MiningKind kind)
    : weights_(std::move(weights)), kind_(kind) {
  if (weights_.empty()) throw std::invalid_argument("mining power distribution needs at least one node");
  double total = 0;
  for (double w : weights_) {
    if (!(w >= 0)) throw std::invalid_argument("mining power weights must be non-negative");
    total += w;
  }
  if (!(total > 0)) throw std::invalid_argument("mining power weights sum to zero");
  cumulative_.reserve(weights_.size());
  double acc = 0;
  for (double& w : weights_) {
    w /= total;
    acc += w;
    cumulative_.push_back(acc);
  }
}

MiningPowerDistribution MiningPowerDistribution::uniform(std::size_t n) {
  return MiningPowerDistribution(std::vector<double>(n, 1.0), MiningKind::uniform);
}

MiningPowerDistribution MiningPowerDistribution::exponential(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (double& x : w) x = rng.exponential();
  return MiningPowerDistribution(std::move(w), MiningKind::exponential);
}

NodeId MiningPowerDistribution::pick(Rng& rng) const {
  double u = rng.unit() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  // Skip zero-weight nodes that share a cumulative value with their successor.
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  while (weights_[idx] == 0 && idx + 1 < weights_.size()) ++idx;
  return static_cast<NodeId>(idx);
}

NodeId pick_miner(const MiningPowerDistribution& dist, Rng& rng) { return dist.pick(rng); }

std::optional<Duration> block_reach_time(const BlockResult& block, const std::vector<double>& weights, double q) {
  if (!(q > 0 && q <= 100)) throw std::invalid_argument("percentile must lie in (0, 100]");
  const std::size_t n = block.validated_ns.size();
  if (weights.size() != n) throw std::invalid_argument("weight vector does not match node count");
  std::vector<std::pair<std::int64_t, double>> reached;
  reached.reserve(n);
  double total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    total += weights[v];
    if (block.validated_ns[v] != kUnreached) reached.emplace_back(block.validated_ns[v], weights[v]);
  }
  std::sort(reached.begin(), reached.end());
  const double target = q / 100.0 * total * (1 - 1e-12);
  double acc = 0;
  for (const auto& [t, w] : reached) {
    acc += w;
    if (acc >= target) return Duration{t};
  }
  return std::nullopt;
}

std::vector<double> weights_for(const MetricsReport& report, Weighting weighting) {
  if (weighting == Weighting::mining_power && !report.mining_weights.empty()) return report.mining_weights;
  return std::vector<double>(report.nodes, 1.0);
}

namespace {

std::optional<Duration> mean_reach(const std::vector<BlockResult>& blocks, const std::vector<double>& weights,
                                   double q) {
  if (!(q > 0 && q <= 100)) throw std::invalid_argument("percentile must lie in (0, 100]");
  if (blocks.empty()) return std::nullopt;
  long double sum = 0;
  for (const auto& b : blocks) {
    auto t = block_reach_time(b, weights, q);
    if (!t) return std::nullopt;
    sum += static_cast<long double>(t->count());
  }
  return Duration{static_cast<std::int64_t>(std::llround(sum / static_cast<long double>(blocks.size())))};
}

}  // namespace

std::optional<Duration> dissemination_percentile(const MetricsReport& report, double q, Weighting weighting) {
  return mean_reach(report.blocks, weights_for(report, weighting), q);
}

std::optional<Duration> optimal_percentile(const MetricsReport& report, double q, Weighting weighting) {
  return mean_reach(report.optimal, weights_for(report, weighting), q);
}

std::vector<CurvePoint> uninformed_curve(const MetricsReport& report, Weighting weighting, Duration bucket) {
  if (bucket <= Duration::zero()) throw std::invalid_argument("curve bucket must be positive");
  std::vector<CurvePoint> out;
  if (report.blocks.empty()) return out;
  const auto weights = weights_for(report, weighting);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  struct Sorted {
    std::vector<std::pair<std::int64_t, double>> times;
    std::size_t cursor = 0;
    double informed = 0;
  };
  std::vector<Sorted> per_block(report.blocks.size());
  std::int64_t horizon = 0;
  for (std::size_t b = 0; b < report.blocks.size(); ++b) {
    const auto& v = report.blocks[b].validated_ns;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != kUnreached) {
        per_block[b].times.emplace_back(v[i], weights[i]);
        horizon = std::max(horizon, v[i]);
      }
    std::sort(per_block[b].times.begin(), per_block[b].times.end());
  }
  const std::int64_t step = bucket.count();
  for (std::int64_t t = 0;; t += step) {
    double uninformed = 0;
    for (auto& s : per_block) {
      while (s.cursor < s.times.size() && s.times[s.cursor].first <= t) s.informed += s.times[s.cursor++].second;
      uninformed += std::max(0.0, total - s.informed) / total;
    }
    out.push_back({Duration{t}, uninformed / static_cast<double>(per_block.size())});
    if (t >= horizon) break;
  }
  return out;
}

std::map<std::uint32_t, std::uint64_t> redundancy_histogram(const MetricsReport& report) {
  std::map<std::uint32_t, std::uint64_t> h;
  for (const auto& b : report.blocks)
    for (std::size_t v = 0; v < b.validated_ns.size(); ++v)
      if (v != b.miner && b.validated_ns[v] != kUnreached) ++h[b.redundant[v]];
  return h;
}

std::map<std::uint32_t, std::uint64_t> responder_rank_histogram(const MetricsReport& report) {
  std::map<std::uint32_t, std::uint64_t> h;
  for (const auto& b : report.blocks)
    for (std::size_t v = 0; v < b.validated_ns.size(); ++v)
      if (v != b.miner && b.validated_ns[v] != kUnreached) ++h[b.responder_rank[v]];
  return h;
}

double coverage(const MetricsReport& report) {
  std::uint64_t reached = 0, total = 0;
  for (const auto& b : report.blocks) {
    total += b.validated_ns.size();
    for (auto t : b.validated_ns) reached += t != kUnreached;
  }
  return total ? static_cast<double>(reached) / static_cast<double>(total) : 0.0;
}

std::vector<BlockResult> theoretic_optimal(const NodeTopology& topology, const std::vector<NodeId>& miners,
                                           const ScenarioConfig& config) {
  const std::size_t n = topology.size();
  std::vector<BlockResult> out;
  out.reserve(miners.size());
  for (std::size_t i = 0; i < miners.size(); ++i) {
    BlockResult r;
    r.id = static_cast<std::uint32_t>(i);
    r.miner = miners[i];
    r.first_header_ns.assign(n, 0);
    r.body_received_ns.assign(n, 0);
    r.validated_ns.assign(n, 0);
    r.redundant.assign(n, 0);
    r.responder_rank.assign(n, 0);
    for (NodeId v = 0; v < n; ++v) {
      if (v == r.miner) continue;
      auto tt = transfer_times(topology, r.miner, v, config.body_batches);
      Duration body = tt.header + config.header_validation + tt.pull_request + tt.body;
      r.first_header_ns[v] = tt.header.count();
      r.body_received_ns[v] = body.count();
      r.validated_ns[v] = (body + config.body_validation).count();
      r.responder_rank[v] = 1;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cougar
