#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "wfsim/errors.hpp"
#include "wfsim/units.hpp"

namespace wfsim::sim {

inline constexpr std::uint64_t kDefaultEventBudget = 1'000'000'000ULL;

template <class Payload>
struct SimEvent {
  VirtualTime fire_at = 0;
  std::uint64_t seq = 0;
  Payload payload{};
};

// Single-threaded discrete-event engine. Events are totally ordered by
// (fire_at, seq); seq is the insertion counter, so simultaneous events run
// in the order they were scheduled.
template <class Payload>
class Engine {
 public:
  using Event = SimEvent<Payload>;

  explicit Engine(std::uint64_t event_budget = kDefaultEventBudget) : budget_(event_budget) {}

  VirtualTime now() const noexcept { return now_; }
  std::uint64_t events_processed() const noexcept { return processed_; }
  std::uint64_t events_scheduled() const noexcept { return next_seq_; }
  std::size_t pending() const noexcept { return queue_.size(); }
  bool idle() const noexcept { return queue_.empty(); }

  void schedule(VirtualTime at, Payload payload) {
    if (at < now_) {
      throw SimulationError("event scheduled in the past: t=" + std::to_string(at) +
                            " < clock " + std::to_string(now_));
    }
    queue_.push(Event{at, next_seq_++, std::move(payload)});
  }

  void schedule_in(Duration delay, Payload payload) { schedule(now_ + delay, std::move(payload)); }

  // Pops the next event and advances the clock. Precondition: !idle().
  Event pop() {
    Event e = queue_.top();
    queue_.pop();
    now_ = e.fire_at;
    return e;
  }

  // Processes events until the queue drains; returns the clock at that point.
  // handler(const Payload&) may schedule further events.
  template <class Handler>
  VirtualTime run_until_idle(Handler&& handler) {
    while (!queue_.empty()) {
      if (processed_ >= budget_) {
        throw SimulationError("event budget of " + std::to_string(budget_) +
                              " exhausted at t=" + std::to_string(now_) + " with " +
                              std::to_string(queue_.size()) + " events pending");
      }
      Event e = pop();
      ++processed_;
      handler(e.payload);
    }
    return now_;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  VirtualTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::uint64_t budget_;
};

}  // namespace wfsim::sim
