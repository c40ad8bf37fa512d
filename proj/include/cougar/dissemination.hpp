#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "cougar/kademlia.hpp"
#include "cougar/latency.hpp"
#include "cougar/overlay.hpp"
#include "cougar/rng.hpp"
#include "cougar/scheduler.hpp"

namespace cougar {

inline constexpr std::size_t kGreedy = std::numeric_limits<std::size_t>::max();

struct TransferTimes {
  Duration header;        // owner -> receiver, one batch
  Duration pull_request;  // receiver -> owner
  Duration body;          // k batches: (k-1) round trips plus a final one-way leg
  Duration timeout;       // 2k round trips
};

// Timings for moving one block from `owner` to `receiver` when the body needs
// `batches` TCP batches.
TransferTimes transfer_times(const NodeTopology& topology, NodeId owner, NodeId receiver, std::uint32_t batches);

enum class PullClass : std::uint8_t { close, random };

// Protocol-specific link semantics consulted by the block state machine.
class Relay {
 public:
  virtual ~Relay() = default;
  virtual bool is_link(NodeId a, NodeId b) const = 0;
  virtual PullClass classify(NodeId node, NodeId advertiser) const = 0;
  // Header recipients (peer, tag) for `node` once it holds a validated block.
  virtual void targets(NodeId node, std::uint16_t tag, std::vector<std::pair<NodeId, std::uint16_t>>& out) = 0;
  virtual std::uint16_t origin_tag() const { return 0; }
};

// Unstructured overlays: every neighbor, either direction. Links the node
// picked keep their own class; links imposed by a peer count as random.
class OverlayRelay final : public Relay {
 public:
  explicit OverlayRelay(const NeighborTable& table) : table_(&table) {}
  bool is_link(NodeId a, NodeId b) const override { return table_->linked(a, b); }
  PullClass classify(NodeId node, NodeId advertiser) const override;
  void targets(NodeId node, std::uint16_t tag, std::vector<std::pair<NodeId, std::uint16_t>>& out) override;

 private:
  const NeighborTable* table_;
};

// Structured broadcast over Kademlia buckets. The tag carries the height the
// sender delegated to the receiver.
class KademliaRelay final : public Relay {
 public:
  KademliaRelay(const std::vector<KademliaState>& states, Rng& rng, std::size_t fanout)
      : states_(&states), rng_(&rng), fanout_(fanout) {}
  bool is_link(NodeId, NodeId) const override { return true; }
  PullClass classify(NodeId, NodeId) const override { return PullClass::random; }
  void targets(NodeId node, std::uint16_t tag, std::vector<std::pair<NodeId, std::uint16_t>>& out) override;
  std::uint16_t origin_tag() const override;

 private:
  const std::vector<KademliaState>* states_;
  Rng* rng_;
  std::size_t fanout_;
};

struct DisseminationParams {
  std::size_t parallelism = 4;  // kGreedy pulls from every advertiser
  bool split_close_random = true;
  Duration header_validation = std::chrono::milliseconds(5);
  Duration body_validation = std::chrono::milliseconds(50);
  std::uint32_t body_batches = 1;
  double failure_prob = 0;
  // Skip advertising to peers that already advertised to us. Score-based
  // overlays turn this off so every neighbor's copy gets timed.
  bool suppress_advertise_back = true;
};

enum class EventKind : std::uint8_t {
  header,
  header_validated,
  pull_request,
  body,
  body_validated,
  pull_timeout,
  maintenance,
};

struct SimEvent {
  EventKind kind;
  std::uint16_t tag = 0;
  std::uint32_t block = 0;
  NodeId node = 0;  // receiver / owner of the handler
  NodeId peer = 0;  // counterpart
};

using EventQueue = Scheduler<SimEvent>;

struct DeliveryRecord {
  SimTime first_header = kNever;
  SimTime header_validated = kNever;
  SimTime first_pull = kNever;
  SimTime body_received = kNever;
  SimTime body_validated = kNever;
  std::uint32_t redundant_bodies = 0;
  std::uint32_t responder_rank = 0;  // 1-based position in pull order; 0 when none
  std::uint32_t pulls_issued = 0;
  std::uint32_t max_in_flight = 0;
};

struct MessageCounts {
  std::uint64_t headers_sent = 0;
  std::uint64_t headers_received = 0;
  std::uint64_t headers_lost_to_teardown = 0;
  std::uint64_t headers_suppressed = 0;
  std::uint64_t pulls_sent = 0;
  std::uint64_t bodies_sent = 0;
  std::uint64_t bodies_lost = 0;
  std::uint64_t bodies_received = 0;
  std::uint64_t timeouts = 0;

  MessageCounts& operator+=(const MessageCounts& o);
};

class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Header-push / body-pull propagation of one block at a time.
class Disseminator {
 public:
  Disseminator(const NodeTopology& topology, Relay& relay, const DisseminationParams& params, EventQueue& queue,
               Rng& failures);

  using Observer = std::function<void(NodeId node, NodeId from, SimTime at)>;
  void set_body_observer(Observer obs) { observer_ = std::move(obs); }
  // Called for every header that reaches a node, duplicates included.
  void set_header_observer(Observer obs) { header_observer_ = std::move(obs); }

  // Replaces the failure_prob coin for body transfers owner -> requester.
  using LossModel = std::function<bool(NodeId owner, NodeId requester)>;
  void set_loss_model(LossModel model) { loss_ = std::move(model); }

  // Starts a block at the queue's current time; the miner holds it validated.
  void create_block(std::uint32_t block, NodeId miner);

  // True while any event of the current block is still queued.
  bool active() const { return outstanding_ > 0; }

  // Dispatch for block events; maintenance events must be routed elsewhere.
  void handle(const SimEvent& ev);

  NodeId miner() const { return miner_; }
  SimTime created_at() const { return created_; }
  std::uint32_t block() const { return block_; }
  const DeliveryRecord& record(NodeId v) const { return nodes_[v].rec; }
  const MessageCounts& counts() const { return counts_; }
  const DisseminationParams& params() const { return params_; }

 private:
  struct Advert {
    NodeId peer;
    PullClass cls;
    bool pulled;
  };
  struct Pull {
    NodeId peer;
    EventId timer;
    std::uint32_t rank;
    PullClass cls;
  };
  struct NodeState {
    DeliveryRecord rec;
    std::vector<Advert> adverts;
    std::vector<Pull> pulls;
    std::uint16_t tag = 0;
    std::uint32_t in_flight[2] = {0, 0};
  };

  EventId post(Duration delay, SimEvent ev);
  void advertise(NodeId node);
  void on_header(NodeId node, NodeId from, std::uint16_t tag);
  void on_header_validated(NodeId node);
  void on_pull_request(NodeId owner, NodeId requester);
  void on_body(NodeId node, NodeId sender);
  void on_body_validated(NodeId node);
  void on_timeout(NodeId node, NodeId advertiser);

  void fill_pulls(NodeId node);
  bool split_active() const;
  bool class_has_room(const NodeState& st, PullClass cls) const;
  void issue_pull(NodeId node, Advert& adv);
  void drop_pull(NodeState& st, std::size_t idx, bool cancel_timer);

  const NodeTopology* topology_;
  Relay* relay_;
  DisseminationParams params_;
  EventQueue* queue_;
  Rng* failures_;
  Observer observer_;
  Observer header_observer_;
  LossModel loss_;

  std::vector<NodeState> nodes_;
  std::vector<std::pair<NodeId, std::uint16_t>> scratch_;
  std::size_t outstanding_ = 0;
  std::uint32_t block_ = 0;
  NodeId miner_ = 0;
  SimTime created_ = kTimeZero;
  MessageCounts counts_;
};

}  // namespace cougar
