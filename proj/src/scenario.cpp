#include "cougar/scenario.hpp"

#include <algorithm>
#include <optional>

#include "cougar/dissemination.hpp"
#include "cougar/kademlia.hpp"
#include "cougar/overlay.hpp"
#include "cougar/perigee.hpp"

namespace cougar {

NodeTopology build_topology(const ScenarioConfig& config) {
  Rng rng(config.seed, Stream::topology);
  std::shared_ptr<const LatencyTrace> trace;
  if (!config.trace_file.empty())
    trace = std::make_shared<LatencyTrace>(load_trace(config.trace_file, config.servers_file));
  else
    trace = std::make_shared<LatencyTrace>(synth_trace(config.synth, rng));
  NodeDistribution dist =
      config.distribution_file.empty() ? uniform_distribution(*trace) : load_distribution(config.distribution_file);
  return project(trace, dist, config.nodes, rng);
}

namespace {

struct Maintenance {
  SimTime at;
  NodeId node;
};

class Runner {
 public:
  explicit Runner(const ScenarioConfig& cfg)
      : cfg_(cfg),
        topology_(build_topology(cfg)),
        overlay_rng_(cfg.seed, Stream::overlay),
        mining_rng_(cfg.seed, Stream::mining),
        failure_rng_(cfg.seed, Stream::failures),
        broadcast_rng_(cfg.seed, "broadcast") {}

  MetricsReport run();

 private:
  DisseminationParams dissemination_params() const {
    DisseminationParams p;
    p.parallelism = cfg_.parallelism;
    p.split_close_random = cfg_.pull_split && cfg_.protocol == Protocol::cougar;
    p.header_validation = cfg_.header_validation;
    p.body_validation = cfg_.body_validation;
    p.body_batches = cfg_.body_batches;
    p.failure_prob = cfg_.failure_prob;
    return p;
  }

  // Runs the current block to quiescence. Maintenance events that fire in the
  // meantime are held back and executed afterwards in (time, node) order.
  void run_block(Disseminator& dis, std::uint32_t id, NodeId miner);
  void on_maintenance(NodeId v, SimTime scheduled);
  void drain_maintenance_until(SimTime t);
  BlockResult collect(const Disseminator& dis) const;
  void finish_overlay(MetricsReport& report, const NeighborTable& table) const;

  const ScenarioConfig& cfg_;
  NodeTopology topology_;
  Rng overlay_rng_;
  Rng mining_rng_;
  Rng failure_rng_;
  Rng broadcast_rng_;
  EventQueue queue_;
  std::vector<Maintenance> deferred_;
  std::unique_ptr<NeighborTable> table_;
  std::unique_ptr<PeerSampler> pss_;
  RejuvenationParams rejuvenation_;
  std::vector<std::string> warnings_;
  std::size_t refused_ = 0;
  std::size_t perigee_skipped_ = 0;
  bool maintenance_ = false;
};

void Runner::on_maintenance(NodeId v, SimTime scheduled) {
  auto out = rejuvenate(v, *table_, topology_, *pss_, rejuvenation_, overlay_rng_);
  refused_ += out.refused;
  SimTime next = std::max(scheduled + cfg_.rejuvenation_period, queue_.now());
  queue_.schedule_at(next, SimEvent{EventKind::maintenance, 0, 0, v, 0});
}

void Runner::drain_maintenance_until(SimTime t) {
  queue_.run(t, [&](const SimEvent& ev) {
    if (ev.kind != EventKind::maintenance) throw std::logic_error("scenario: block event outside a block");
    on_maintenance(ev.node, queue_.now());
  });
  if (queue_.now() < t) queue_.advance_to(t);
}

void Runner::run_block(Disseminator& dis, std::uint32_t id, NodeId miner) {
  dis.create_block(id, miner);
  while (dis.active()) {
    queue_.step([&](const SimEvent& ev) {
      if (ev.kind == EventKind::maintenance)
        deferred_.push_back({queue_.now(), ev.node});
      else
        dis.handle(ev);
    });
  }
  if (deferred_.empty()) return;
  std::sort(deferred_.begin(), deferred_.end(), [](const Maintenance& a, const Maintenance& b) {
    return a.at != b.at ? a.at < b.at : a.node < b.node;
  });
  auto held = std::move(deferred_);
  deferred_.clear();
  for (const auto& m : held) on_maintenance(m.node, m.at);
}

BlockResult Runner::collect(const Disseminator& dis) const {
  const std::size_t n = topology_.size();
  BlockResult r;
  r.id = dis.block();
  r.miner = dis.miner();
  r.first_header_ns.resize(n);
  r.body_received_ns.resize(n);
  r.validated_ns.resize(n);
  r.redundant.resize(n);
  r.responder_rank.resize(n);
  const SimTime t0 = dis.created_at();
  auto rel = [&](SimTime t) { return t == kNever ? kUnreached : (t - t0).count(); };
  for (NodeId v = 0; v < n; ++v) {
    const auto& rec = dis.record(v);
    r.first_header_ns[v] = rel(rec.first_header);
    r.body_received_ns[v] = rel(rec.body_received);
    r.validated_ns[v] = rel(rec.body_validated);
    r.redundant[v] = rec.redundant_bodies;
    r.responder_rank[v] = rec.responder_rank;
  }
  return r;
}

void Runner::finish_overlay(MetricsReport& report, const NeighborTable& table) const {
  auto comps = connected_components(table);
  report.overlay.components = comps.components;
  report.overlay.largest_component = comps.largest;
  std::size_t total = 0;
  for (NodeId v = 0; v < table.size(); ++v) {
    total += table.degree(v);
    report.overlay.max_degree = std::max(report.overlay.max_degree, table.degree(v));
  }
  report.overlay.mean_degree = table.size() ? static_cast<double>(total) / static_cast<double>(table.size()) : 0.0;
  if (comps.components > 1)
    report.warnings.push_back("overlay disconnected: " + std::to_string(comps.components) +
                              " components, largest has " + std::to_string(comps.largest) + " nodes");
  if (cfg_.overlay_snapshot) {
    for (NodeId v = 0; v < table.size(); ++v)
      report.snapshot.push_back(NodeSnapshot{v, topology_.trace().server(topology_.server_of(v)).id, table.close(v),
                                             table.random(v), table.incoming(v)});
  }
}

MetricsReport Runner::run() {
  const std::size_t n = cfg_.nodes;
  MetricsReport report;
  report.protocol = std::string(protocol_name(cfg_.protocol));
  report.effective_config = cfg_.render();
  report.config_entries = cfg_.entries();
  report.scenario_hash = cfg_.hash();
  report.seed = cfg_.seed;
  report.nodes = n;
  report.mining = cfg_.mining;

  MiningPowerDistribution power = cfg_.mining == MiningKind::exponential
                                      ? MiningPowerDistribution::exponential(n, mining_rng_)
                                      : MiningPowerDistribution::uniform(n);
  report.mining_weights = power.weights();

  const std::size_t warmup_blocks =
      cfg_.protocol == Protocol::perigee ? cfg_.perigee_rounds * cfg_.perigee_blocks_per_round : 0;
  std::vector<NodeId> miners(warmup_blocks + cfg_.blocks);
  for (auto& m : miners) m = power.pick(mining_rng_);
  const std::vector<NodeId> measured(miners.begin() + static_cast<std::ptrdiff_t>(warmup_blocks), miners.end());

  DisseminationParams dp = dissemination_params();
  std::unique_ptr<Relay> relay;
  std::vector<KademliaState> kad;
  std::unique_ptr<PerigeeOverlay> perigee;
  SimTime start = kTimeZero;

  switch (cfg_.protocol) {
    case Protocol::cougar: {
      table_ = std::make_unique<NeighborTable>(n, cfg_.max_degree);
      pss_ = std::make_unique<PeerSampler>(n, overlay_rng_);
      rejuvenation_.close = cfg_.close;
      rejuvenation_.random = cfg_.random;
      rejuvenation_.probes = cfg_.rejuvenation_probes;
      rejuvenation_.probe = RttProbe{cfg_.rtt_noise, cfg_.rtt_pings};
      const auto period = cfg_.rejuvenation_period.count();
      for (NodeId v = 0; v < n; ++v) {
        Duration phase{static_cast<std::int64_t>(overlay_rng_.below(static_cast<std::uint64_t>(period)))};
        queue_.schedule_at(kTimeZero + phase, SimEvent{EventKind::maintenance, 0, 0, v, 0});
      }
      start = kTimeZero + static_cast<std::int64_t>(cfg_.rejuvenation_warmup_rounds) * cfg_.rejuvenation_period;
      maintenance_ = true;
      relay = std::make_unique<OverlayRelay>(*table_);
      break;
    }
    case Protocol::random:
    case Protocol::geographic: {
      BuildWarnings bw;
      table_ = std::make_unique<NeighborTable>(
          cfg_.protocol == Protocol::random
              ? build_random_overlay(n, cfg_.degree, cfg_.max_degree, overlay_rng_, &bw)
              : build_geographic_overlay(topology_, cfg_.degree, cfg_.max_degree, overlay_rng_, &bw));
      for (auto& w : bw.messages) warnings_.push_back(w);
      relay = std::make_unique<OverlayRelay>(*table_);
      break;
    }
    case Protocol::kademlia: {
      const int width = kademlia_width(n);
      auto ids = assign_kademlia_ids(n, width, overlay_rng_);
      kad = build_kademlia(ids, width, cfg_.kad_bucket_size, overlay_rng_);
      relay = std::make_unique<KademliaRelay>(kad, broadcast_rng_, cfg_.kad_fanout);
      break;
    }
    case Protocol::perigee: {
      PerigeeParams pp;
      pp.outgoing = cfg_.perigee_outgoing;
      pp.incoming_cap = cfg_.perigee_incoming;
      perigee = std::make_unique<PerigeeOverlay>(n, pp, overlay_rng_);
      pss_ = std::make_unique<PeerSampler>(n, overlay_rng_);
      relay = std::make_unique<OverlayRelay>(perigee->table());
      dp.suppress_advertise_back = false;
      break;
    }
  }

  Disseminator dis(topology_, *relay, dp, queue_, failure_rng_);
  if (perigee) dis.set_header_observer([&](NodeId v, NodeId from, SimTime at) { perigee->record(v, from, at); });

  auto perigee_block = [&](std::uint32_t id, NodeId miner, std::size_t index) {
    perigee->begin_block();
    run_block(dis, id, miner);
    perigee->end_block(miner);
    if ((index + 1) % cfg_.perigee_blocks_per_round == 0) {
      auto st = perigee->recalibrate_all(*pss_, overlay_rng_);
      perigee_skipped_ += st.warnings.size();
      report.perigee_established_churn.push_back(st.replaced_established);
    }
  };

  for (std::size_t i = 0; i < warmup_blocks; ++i) {
    perigee_block(static_cast<std::uint32_t>(i), miners[i], i);
  }
  MessageCounts warm = dis.counts();

  for (std::size_t b = 0; b < cfg_.blocks; ++b) {
    const std::uint32_t id = static_cast<std::uint32_t>(warmup_blocks + b);
    if (maintenance_) {
      SimTime slot = start + static_cast<std::int64_t>(b) * cfg_.block_interval;
      drain_maintenance_until(std::max(slot, queue_.now()));
    }
    std::vector<std::uint32_t> degree;
    if (const NeighborTable* t = table_ ? table_.get() : perigee ? &perigee->table() : nullptr)
      for (NodeId v = 0; v < n; ++v) degree.push_back(static_cast<std::uint32_t>(t->degree(v)));
    if (perigee)
      perigee_block(id, measured[b], warmup_blocks + b);
    else
      run_block(dis, id, measured[b]);
    report.blocks.push_back(collect(dis));
    report.blocks.back().degree = std::move(degree);
  }

  report.counts = dis.counts();
  report.counts.headers_sent -= warm.headers_sent;
  report.counts.headers_received -= warm.headers_received;
  report.counts.headers_lost_to_teardown -= warm.headers_lost_to_teardown;
  report.counts.headers_suppressed -= warm.headers_suppressed;
  report.counts.pulls_sent -= warm.pulls_sent;
  report.counts.bodies_sent -= warm.bodies_sent;
  report.counts.bodies_lost -= warm.bodies_lost;
  report.counts.bodies_received -= warm.bodies_received;
  report.counts.timeouts -= warm.timeouts;

  if (table_)
    finish_overlay(report, *table_);
  else if (perigee)
    finish_overlay(report, perigee->table());

  if (refused_ > 0) report.warnings.push_back("rejuvenation: " + std::to_string(refused_) + " connection attempts refused");
  if (perigee_skipped_ > 0)
    report.warnings.push_back("perigee: " + std::to_string(perigee_skipped_) +
                              " node recalibrations skipped for lack of scored neighbors");
  for (auto& w : warnings_) report.warnings.push_back(std::move(w));
  std::size_t unreached = 0;
  for (const auto& b : report.blocks)
    for (auto t : b.validated_ns) unreached += t == kUnreached;
  if (unreached > 0)
    report.warnings.push_back("incomplete dissemination: " + std::to_string(unreached) +
                              " node-block deliveries never completed");

  report.optimal = theoretic_optimal(topology_, measured, cfg_);
  return report;
}

}  // namespace

MetricsReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  Runner runner(config);
  return runner.run();
}

}  // namespace cougar
