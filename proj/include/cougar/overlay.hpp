#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cougar/latency.hpp"
#include "cougar/rng.hpp"

namespace cougar {

// How a link looks from one endpoint: chosen by this node as a close or a
// random neighbor, or imposed by the peer.
enum class LinkKind : std::uint8_t { close, random, incoming };

enum class ConnectResult : std::uint8_t { accepted, refused };

// Bidirectional neighbor bookkeeping for every node. If u lists v among its
// outgoing links then v lists u as incoming, and vice versa.
class NeighborTable {
 public:
  NeighborTable(std::size_t n, std::size_t default_degree_limit);

  std::size_t size() const { return nodes_.size(); }

  void set_degree_limit(NodeId v, std::size_t limit) { nodes_[v].degree_limit = limit; }
  std::size_t degree_limit(NodeId v) const { return nodes_[v].degree_limit; }

  const std::vector<NodeId>& close(NodeId v) const { return nodes_[v].close; }
  const std::vector<NodeId>& random(NodeId v) const { return nodes_[v].random; }
  const std::vector<NodeId>& incoming(NodeId v) const { return nodes_[v].incoming; }

  std::size_t outgoing_count(NodeId v) const { return nodes_[v].close.size() + nodes_[v].random.size(); }
  std::size_t degree(NodeId v) const { return outgoing_count(v) + nodes_[v].incoming.size(); }

  bool linked(NodeId u, NodeId v) const;
  std::optional<LinkKind> kind(NodeId u, NodeId v) const;

  // Accepted iff both endpoints are below their degree limits. Self links and
  // duplicate links are caller bugs.
  ConnectResult try_connect(NodeId u, NodeId v, LinkKind as);

  // Removes the link u->v that u selected, on both sides.
  void disconnect(NodeId u, NodeId v);

  // Moves an existing outgoing link between the close and random classes.
  void reclassify(NodeId u, NodeId v, LinkKind as);

  std::vector<NodeId> neighbors(NodeId v) const;

  template <class F>
  void for_each_neighbor(NodeId v, F&& f) const {
    const auto& s = nodes_[v];
    for (NodeId x : s.close) f(x);
    for (NodeId x : s.random) f(x);
    for (NodeId x : s.incoming) f(x);
  }

  // Throws std::logic_error describing the first broken invariant.
  void check_invariants() const;

 private:
  struct Entry {
    std::vector<NodeId> close;
    std::vector<NodeId> random;
    std::vector<NodeId> incoming;
    std::size_t degree_limit = 0;
  };
  std::vector<Entry> nodes_;
};

// Uniform sampler over alive nodes, standing in for an unbiased gossip-based
// peer sampling service.
class PeerSampler {
 public:
  PeerSampler(std::size_t n, Rng& rng) : alive_(n, true), rng_(&rng) {}

  void set_alive(NodeId v, bool alive) { alive_[v] = alive; }
  bool alive(NodeId v) const { return alive_[v]; }

  // A uniform alive node other than the caller and its current neighbors,
  // also skipping anything in extra_exclude. nullopt when none is left.
  std::optional<NodeId> sample(NodeId caller, const NeighborTable& table,
                               const std::vector<NodeId>& extra_exclude = {});

  bool responsive(NodeId v, const NeighborTable& table) const {
    return alive_[v] && table.degree(v) < table.degree_limit(v);
  }

 private:
  std::vector<bool> alive_;
  Rng* rng_;
};

struct RttProbe {
  double noise = 0;  // each ping is scaled by (1 + U(-noise, noise))
  int pings = 1;
};

Duration measure_rtt(NodeId u, NodeId v, const NodeTopology& topology, const RttProbe& probe, Rng& rng);

struct RejuvenationParams {
  std::size_t close = 4;
  std::size_t random = 4;
  std::size_t probes = 8;  // extra PSS samples measured as close-set candidates
  RttProbe probe;
};

struct RejuvenationOutcome {
  std::vector<NodeId> dropped;
  std::size_t refused = 0;
  std::optional<std::string> warning;
};

// One link-placement round for a single node: measure every outgoing link and
// the probe candidates, keep the C lowest-RTT ones (uniform tie-break), tear
// the rest down, and refill with responsive random peers up to C+R.
RejuvenationOutcome rejuvenate(NodeId v, NeighborTable& table, const NodeTopology& topology, PeerSampler& pss,
                               const RejuvenationParams& params, Rng& rng);

struct BuildWarnings {
  std::vector<std::string> messages;
};

// Every node opens degree_out links to uniform random distinct peers;
// refused attempts resample.
NeighborTable build_random_overlay(std::size_t n, std::size_t degree_out, std::size_t degree_limit, Rng& rng,
                                   BuildWarnings* warnings = nullptr);

// Half of each node's outgoing links go to uniform random same-continent peers,
// half to uniform random peers on other continents. Shortfalls on either side
// are filled from the other.
NeighborTable build_geographic_overlay(const NodeTopology& topology, std::size_t degree_out,
                                       std::size_t degree_limit, Rng& rng, BuildWarnings* warnings = nullptr);

struct ComponentStats {
  std::size_t components = 0;
  std::size_t largest = 0;
  std::vector<std::uint32_t> label;  // component index per node
};

ComponentStats connected_components(const NeighborTable& table);

}  // namespace cougar
