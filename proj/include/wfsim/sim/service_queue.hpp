#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "wfsim/errors.hpp"
#include "wfsim/units.hpp"

namespace wfsim::sim {

enum class ServiceKind : std::uint8_t { manager, storage, client, net_out, net_in, loopback, core };

const char* to_string(ServiceKind k) noexcept;

struct EntityId {
  HostId host = 0;
  ServiceKind kind = ServiceKind::client;
  friend bool operator==(const EntityId&, const EntityId&) = default;
};

struct ServiceSlot {
  VirtualTime start;
  VirtualTime end;
};

// Non-preemptive FIFO server with deterministic service times.
//
// Because service never depends on requests that arrive later, the start of
// a request admitted at `now` is fully determined by busy_until: the pending
// FIFO is represented implicitly by the chain of reserved slots. The caller
// schedules the completion event at slot.end and reports it via complete().
class ServiceQueue {
 public:
  ServiceQueue() = default;
  explicit ServiceQueue(EntityId owner) : owner_(owner) {}

  ServiceSlot admit(VirtualTime now, Duration service) {
    VirtualTime start = std::max(now, busy_until_);
    busy_until_ = start + service;
    ++admitted_;
    busy_time_ += service;
    return {start, busy_until_};
  }

  // Variant for cut-through receivers: service cannot finish before the
  // tail of the data has arrived.
  ServiceSlot admit_not_before(VirtualTime now, Duration service, VirtualTime earliest_end) {
    VirtualTime start = std::max(now, busy_until_);
    VirtualTime end = std::max(start + service, earliest_end);
    busy_until_ = end;
    ++admitted_;
    busy_time_ += end - start;
    return {start, end};
  }

  void complete() {
    if (completed_ >= admitted_) {
      throw SimulationError(std::string("completion without admission on ") + to_string(owner_.kind) +
                            " queue of host " + std::to_string(owner_.host));
    }
    ++completed_;
  }

  EntityId owner() const noexcept { return owner_; }
  VirtualTime busy_until() const noexcept { return busy_until_; }
  std::uint64_t admitted() const noexcept { return admitted_; }
  std::uint64_t completed() const noexcept { return completed_; }
  std::uint64_t in_flight() const noexcept { return admitted_ - completed_; }
  Duration busy_time() const noexcept { return busy_time_; }

 private:
  EntityId owner_{};
  VirtualTime busy_until_ = 0;
  std::uint64_t admitted_ = 0;
  std::uint64_t completed_ = 0;
  Duration busy_time_ = 0;
};

}  // namespace wfsim::sim
