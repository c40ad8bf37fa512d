#include "cougar/dissemination.hpp"

#include <algorithm>

namespace cougar {

TransferTimes transfer_times(const NodeTopology& topology, NodeId owner, NodeId receiver, std::uint32_t batches) {
  if (batches < 1) throw std::invalid_argument("transfer_times: body needs at least one batch");
  const Duration down = topology.one_way(owner, receiver);
  const Duration up = topology.one_way(receiver, owner);
  const Duration rtt = down + up;
  TransferTimes t;
  t.header = down;
  t.pull_request = up;
  t.body = static_cast<std::int64_t>(batches - 1) * rtt + down;
  t.timeout = 2 * static_cast<std::int64_t>(batches) * rtt;
  return t;
}

MessageCounts& MessageCounts::operator+=(const MessageCounts& o) {
  headers_sent += o.headers_sent;
  headers_received += o.headers_received;
  headers_lost_to_teardown += o.headers_lost_to_teardown;
  headers_suppressed += o.headers_suppressed;
  pulls_sent += o.pulls_sent;
  bodies_sent += o.bodies_sent;
  bodies_lost += o.bodies_lost;
  bodies_received += o.bodies_received;
  timeouts += o.timeouts;
  return *this;
}

PullClass OverlayRelay::classify(NodeId node, NodeId advertiser) const {
  return table_->kind(node, advertiser) == LinkKind::close ? PullClass::close : PullClass::random;
}

void OverlayRelay::targets(NodeId node, std::uint16_t, std::vector<std::pair<NodeId, std::uint16_t>>& out) {
  table_->for_each_neighbor(node, [&](NodeId v) { out.emplace_back(v, 0); });
}

void KademliaRelay::targets(NodeId node, std::uint16_t tag, std::vector<std::pair<NodeId, std::uint16_t>>& out) {
  for (const auto& t : kad_broadcast_targets((*states_)[node], tag, *rng_, fanout_))
    out.emplace_back(t.peer, static_cast<std::uint16_t>(t.child_height));
}

std::uint16_t KademliaRelay::origin_tag() const {
  return states_->empty() ? 0 : static_cast<std::uint16_t>(states_->front().width);
}

Disseminator::Disseminator(const NodeTopology& topology, Relay& relay, const DisseminationParams& params,
                           EventQueue& queue, Rng& failures)
    : topology_(&topology), relay_(&relay), params_(params), queue_(&queue), failures_(&failures),
      nodes_(topology.size()) {
  if (params_.parallelism < 1) throw std::invalid_argument("dissemination: parallelism must be at least 1");
  if (params_.body_batches < 1) throw std::invalid_argument("dissemination: body_batches must be at least 1");
  if (!(params_.failure_prob >= 0 && params_.failure_prob <= 1))
    throw std::invalid_argument("dissemination: failure_prob must be in [0,1]");
  if (params_.header_validation < Duration::zero() || params_.body_validation < Duration::zero())
    throw std::invalid_argument("dissemination: validation delays must be non-negative");
}

EventId Disseminator::post(Duration delay, SimEvent ev) {
  ev.block = block_;
  ++outstanding_;
  return queue_->schedule(delay, ev);
}

void Disseminator::create_block(std::uint32_t block, NodeId miner) {
  if (active()) throw std::logic_error("dissemination: previous block is still in flight");
  if (miner >= nodes_.size()) throw std::invalid_argument("dissemination: unknown miner");
  for (auto& st : nodes_) {
    st.rec = DeliveryRecord{};
    st.adverts.clear();
    st.pulls.clear();
    st.tag = 0;
    st.in_flight[0] = st.in_flight[1] = 0;
  }
  block_ = block;
  miner_ = miner;
  created_ = queue_->now();
  auto& m = nodes_[miner].rec;
  m.first_header = m.header_validated = m.first_pull = m.body_received = m.body_validated = created_;
  nodes_[miner].tag = relay_->origin_tag();
  advertise(miner);
}

void Disseminator::handle(const SimEvent& ev) {
  if (ev.kind == EventKind::maintenance) throw std::logic_error("dissemination: maintenance event routed to block handler");
  if (ev.block != block_) throw std::logic_error("dissemination: event for a block that is not active");
  --outstanding_;
  switch (ev.kind) {
    case EventKind::header: on_header(ev.node, ev.peer, ev.tag); break;
    case EventKind::header_validated: on_header_validated(ev.node); break;
    case EventKind::pull_request: on_pull_request(ev.node, ev.peer); break;
    case EventKind::body: on_body(ev.node, ev.peer); break;
    case EventKind::body_validated: on_body_validated(ev.node); break;
    case EventKind::pull_timeout: on_timeout(ev.node, ev.peer); break;
    case EventKind::maintenance: break;
  }
}

void Disseminator::advertise(NodeId node) {
  auto& st = nodes_[node];
  scratch_.clear();
  relay_->targets(node, st.tag, scratch_);
  for (auto [peer, tag] : scratch_) {
    if (peer == node) continue;
    bool holder = params_.suppress_advertise_back && std::any_of(st.adverts.begin(), st.adverts.end(), [&](const Advert& a) { return a.peer == peer; });
    if (holder) {
      ++counts_.headers_suppressed;
      continue;
    }
    post(topology_->one_way(node, peer), SimEvent{EventKind::header, tag, 0, peer, node});
    ++counts_.headers_sent;
  }
}

void Disseminator::on_header(NodeId node, NodeId from, std::uint16_t tag) {
  if (!relay_->is_link(node, from))
    throw ProtocolViolation("header from non-neighbor " + std::to_string(from) + " at node " + std::to_string(node));
  ++counts_.headers_received;
  if (header_observer_) header_observer_(node, from, queue_->now());
  auto& st = nodes_[node];
  st.adverts.push_back(Advert{from, relay_->classify(node, from), false});
  auto& rec = st.rec;

  if (rec.body_received != kNever) return;
  if (rec.first_header == kNever) {
    rec.first_header = queue_->now();
    st.tag = tag;
    post(params_.header_validation, SimEvent{EventKind::header_validated, 0, 0, node, node});
    return;
  }
  if (rec.header_validated != kNever) fill_pulls(node);
}

void Disseminator::on_header_validated(NodeId node) {
  nodes_[node].rec.header_validated = queue_->now();
  fill_pulls(node);
}

bool Disseminator::split_active() const {
  const std::size_t p = params_.parallelism;
  return params_.split_close_random && p != kGreedy && p >= 2;
}

bool Disseminator::class_has_room(const NodeState& st, PullClass cls) const {
  const std::size_t p = params_.parallelism;
  if (!split_active()) return true;
  const std::size_t cap = cls == PullClass::close ? p / 2 : p - p / 2;
  return st.in_flight[static_cast<int>(cls)] < cap;
}

void Disseminator::fill_pulls(NodeId node) {
  auto& st = nodes_[node];
  if (st.rec.body_received != kNever || st.rec.header_validated == kNever) return;
  for (std::size_t i = 0; i < st.adverts.size() && st.pulls.size() < params_.parallelism; ++i) {
    auto& adv = st.adverts[i];
    if (adv.pulled || !class_has_room(st, adv.cls)) continue;
    issue_pull(node, adv);
  }
}

void Disseminator::issue_pull(NodeId node, Advert& adv) {
  auto& st = nodes_[node];
  adv.pulled = true;
  auto tt = transfer_times(*topology_, adv.peer, node, params_.body_batches);
  post(tt.pull_request, SimEvent{EventKind::pull_request, 0, 0, adv.peer, node});
  EventId timer = post(tt.timeout, SimEvent{EventKind::pull_timeout, 0, 0, node, adv.peer});
  auto rank = ++st.rec.pulls_issued;
  if (st.rec.first_pull == kNever) st.rec.first_pull = queue_->now();
  st.pulls.push_back(Pull{adv.peer, timer, rank, adv.cls});
  ++st.in_flight[static_cast<int>(adv.cls)];
  st.rec.max_in_flight = std::max<std::uint32_t>(st.rec.max_in_flight, static_cast<std::uint32_t>(st.pulls.size()));
  ++counts_.pulls_sent;
}

void Disseminator::drop_pull(NodeState& st, std::size_t idx, bool cancel_timer) {
  const auto& p = st.pulls[idx];
  if (cancel_timer && queue_->cancel(p.timer)) --outstanding_;
  --st.in_flight[static_cast<int>(p.cls)];
  st.pulls.erase(st.pulls.begin() + static_cast<std::ptrdiff_t>(idx));
}

void Disseminator::on_pull_request(NodeId owner, NodeId requester) {
  if (nodes_[owner].rec.body_validated == kNever)
    throw ProtocolViolation("pull for unknown block at node " + std::to_string(owner));
  ++counts_.bodies_sent;
  if (loss_ ? loss_(owner, requester) : failures_->bernoulli(params_.failure_prob)) {
    ++counts_.bodies_lost;
    return;
  }
  auto tt = transfer_times(*topology_, owner, requester, params_.body_batches);
  post(tt.body, SimEvent{EventKind::body, 0, 0, requester, owner});
}

void Disseminator::on_body(NodeId node, NodeId sender) {
  ++counts_.bodies_received;
  if (observer_) observer_(node, sender, queue_->now());
  auto& st = nodes_[node];
  auto it = std::find_if(st.pulls.begin(), st.pulls.end(), [&](const Pull& p) { return p.peer == sender; });
  if (st.rec.body_received == kNever) {
    st.rec.body_received = queue_->now();
    st.rec.responder_rank = it != st.pulls.end() ? it->rank : 0;
    post(params_.body_validation, SimEvent{EventKind::body_validated, 0, 0, node, node});
  } else {
    ++st.rec.redundant_bodies;
  }
  if (it != st.pulls.end()) drop_pull(st, static_cast<std::size_t>(it - st.pulls.begin()), true);
}

void Disseminator::on_body_validated(NodeId node) {
  auto& st = nodes_[node];
  st.rec.body_validated = queue_->now();
  // Outstanding pulls stop being tracked; bodies already on the wire still
  // arrive and are counted as redundant.
  while (!st.pulls.empty()) drop_pull(st, st.pulls.size() - 1, true);
  advertise(node);
}

void Disseminator::on_timeout(NodeId node, NodeId advertiser) {
  auto& st = nodes_[node];
  auto it = std::find_if(st.pulls.begin(), st.pulls.end(), [&](const Pull& p) { return p.peer == advertiser; });
  if (it == st.pulls.end()) throw std::logic_error("dissemination: timeout for a pull that is not in flight");
  const PullClass freed = it->cls;
  drop_pull(st, static_cast<std::size_t>(it - st.pulls.begin()), false);
  ++counts_.timeouts;
  if (st.rec.body_received != kNever) return;

  if (st.pulls.size() < params_.parallelism) {
    Advert* pick = nullptr;
    if (split_active())
      for (auto& a : st.adverts)
        if (!a.pulled && a.cls == freed) {
          pick = &a;
          break;
        }
    if (!pick)
      for (auto& a : st.adverts)
        if (!a.pulled) {
          pick = &a;
          break;
        }
    if (pick) issue_pull(node, *pick);
  }
  fill_pulls(node);
}

}  // namespace cougar
