#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "cougar/time.hpp"

namespace cougar {

using EventId = std::uint64_t;

// Discrete-event core. Events are ordered by (fire time, insertion sequence),
// so equal-time events fire in the order they were scheduled.
template <class Payload>
class Scheduler {
 public:
  struct Event {
    SimTime fire_at;
    EventId seq;
    Payload payload;
  };

  SimTime now() const { return now_; }
  bool empty() const { return pending_ == 0; }
  std::size_t pending() const { return pending_; }

  EventId schedule(Duration delay, Payload payload) {
    if (delay < Duration::zero())
      throw std::logic_error("scheduler: negative delay");
    return push(now_ + delay, std::move(payload));
  }

  EventId schedule_at(SimTime at, Payload payload) {
    if (at < now_) throw std::logic_error("scheduler: event scheduled into the past");
    return push(at, std::move(payload));
  }

  // True when the event was still pending and is now removed.
  bool cancel(EventId id) {
    if (id >= live_.size()) throw std::invalid_argument("scheduler: unknown event handle");
    if (!live_[id]) return false;
    live_[id] = false;
    --pending_;
    return true;
  }

  // Pops and dispatches the next live event. Returns false when none is left.
  template <class Handler>
  bool step(Handler&& handler) {
    while (!heap_.empty()) {
      Event ev = heap_.top();
      heap_.pop();
      if (!live_[ev.seq]) continue;
      live_[ev.seq] = false;
      --pending_;
      now_ = ev.fire_at;
      handler(ev.payload);
      return true;
    }
    return false;
  }

  // Runs until the queue drains or the next event lies beyond the horizon.
  template <class Handler>
  SimTime run(Handler&& handler) {
    while (step(handler)) {
    }
    return now_;
  }

  template <class Handler>
  SimTime run(SimTime horizon, Handler&& handler) {
    while (true) {
      drop_dead();
      if (heap_.empty()) break;
      if (heap_.top().fire_at > horizon) {
        if (horizon > now_) now_ = horizon;
        break;
      }
      step(handler);
    }
    return now_;
  }

  // Moves the clock forward with no events processed.
  void advance_to(SimTime t) {
    drop_dead();
    if (t < now_) throw std::logic_error("scheduler: clock cannot move backwards");
    if (!heap_.empty() && heap_.top().fire_at < t)
      throw std::logic_error("scheduler: advancing past pending events");
    now_ = t;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  EventId push(SimTime at, Payload payload) {
    EventId id = live_.size();
    live_.push_back(true);
    heap_.push(Event{at, id, std::move(payload)});
    ++pending_;
    return id;
  }

  void drop_dead() {
    while (!heap_.empty() && !live_[heap_.top().seq]) heap_.pop();
  }

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::vector<bool> live_;
  std::size_t pending_ = 0;
  SimTime now_ = kTimeZero;
};

}  // namespace cougar
