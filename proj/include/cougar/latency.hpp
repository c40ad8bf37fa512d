#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cougar/rng.hpp"
#include "cougar/time.hpp"

namespace cougar {

using NodeId = std::uint32_t;
using ServerIndex = std::uint32_t;

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Continent : std::uint8_t { Africa, Europe, NorthAmerica, SouthAmerica, Oceania, Asia };

inline constexpr int kContinentCount = 6;

std::string_view continent_name(Continent c);
std::optional<Continent> parse_continent(std::string_view label);

struct Server {
  std::string id;
  std::string city;
  std::string country;
  Continent continent = Continent::Europe;
  double latitude = 0;
  double longitude = 0;
};

// Directed round-trip times between measurement servers. rtt(a, b) is the
// RTT of a probe initiated by a toward b; the matrix is not symmetrized.
class LatencyTrace {
 public:
  LatencyTrace() = default;
  LatencyTrace(std::vector<Server> servers, std::vector<std::int64_t> rtt_us);

  std::size_t size() const { return servers_.size(); }
  const Server& server(ServerIndex s) const { return servers_[s]; }
  const std::vector<Server>& servers() const { return servers_; }

  std::int64_t rtt_us(ServerIndex a, ServerIndex b) const { return rtt_us_[a * servers_.size() + b]; }
  Duration rtt(ServerIndex a, ServerIndex b) const { return from_us(rtt_us(a, b)); }

  std::optional<ServerIndex> find(std::string_view id) const;

 private:
  std::vector<Server> servers_;
  std::vector<std::int64_t> rtt_us_;
};

// Reads the server companion file and the directed-pair RTT file. Every
// ordered pair, including self pairs, must be present exactly once.
LatencyTrace load_trace(const std::filesystem::path& rtt_csv, const std::filesystem::path& servers_csv);
void save_trace(const LatencyTrace& trace, const std::filesystem::path& rtt_csv,
                const std::filesystem::path& servers_csv);

struct SynthTraceParams {
  int clusters = 6;
  int servers_per_cluster = 10;
  Duration intra_min = from_us(5'000);
  Duration intra_max = from_us(40'000);
  Duration inter_min = from_us(80'000);
  Duration inter_max = from_us(300'000);
  double asymmetry_jitter = 0.1;
  Duration self_rtt = from_us(1'000);
  bool assign_continents = true;
};

// Clustered synthetic trace. Server pairs inside a cluster draw an RTT from the
// intra range; server pairs across clusters share a per-cluster-pair base drawn
// from the inter range. Each direction is then jittered independently by up to
// +-asymmetry_jitter and clamped back into its range.
LatencyTrace synth_trace(const SynthTraceParams& params, Rng& rng);

struct NodeDistribution {
  std::vector<std::pair<std::string, double>> weights;
};

NodeDistribution load_distribution(const std::filesystem::path& path);
NodeDistribution uniform_distribution(const LatencyTrace& trace);

// N simulated nodes placed onto trace servers.
class NodeTopology {
 public:
  NodeTopology(std::shared_ptr<const LatencyTrace> trace, std::vector<ServerIndex> placement);

  std::size_t size() const { return placement_.size(); }
  ServerIndex server_of(NodeId v) const { return placement_[v]; }
  const std::vector<ServerIndex>& placement() const { return placement_; }
  const LatencyTrace& trace() const { return *trace_; }
  std::shared_ptr<const LatencyTrace> trace_ptr() const { return trace_; }
  Continent continent_of(NodeId v) const { return trace_->server(placement_[v]).continent; }

  // Half of the directional server RTT. Co-located nodes use the server's
  // self RTT. Messaging oneself is a caller bug.
  Duration one_way(NodeId a, NodeId b) const {
    if (a == b) throw std::invalid_argument("one_way: a node cannot message itself");
    return Duration{trace_->rtt_us(placement_[a], placement_[b]) * 500};
  }

  Duration rtt(NodeId a, NodeId b) const { return one_way(a, b) + one_way(b, a); }

 private:
  std::shared_ptr<const LatencyTrace> trace_;
  std::vector<ServerIndex> placement_;
};

// Per-server node counts by largest-remainder rounding (ties go to the lower
// server index). Returned in trace server order.
std::vector<std::size_t> proportional_counts(const LatencyTrace& trace, const NodeDistribution& dist,
                                             std::size_t n);

NodeTopology project(std::shared_ptr<const LatencyTrace> trace, const NodeDistribution& dist, std::size_t n,
                     Rng& rng);

void save_topology(const NodeTopology& topology, const std::filesystem::path& path);

}  // namespace cougar
