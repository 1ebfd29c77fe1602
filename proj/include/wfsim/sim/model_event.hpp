#pragma once

#include <cstdint>

#include "wfsim/sim/engine.hpp"
#include "wfsim/units.hpp"

namespace wfsim::sim {

enum class EventKind : std::uint8_t {
  frame_head,    // first byte of a frame reaches the destination in-queue
  core_arrival,  // frame reaches the aggregate core queue
  deliver,       // last frame assembled; hand request to its service
  service_done,  // a system service finished a request
  driver_wake,   // workload driver timer
};

// Payload of every event in a storage-system run. The meaning of id/aux
// depends on kind; see Network and Cluster.
struct ModelEvent {
  EventKind kind = EventKind::driver_wake;
  HostId host = 0;
  std::uint64_t id = 0;
  std::int64_t aux = 0;
};

using ModelEngine = Engine<ModelEvent>;

}  // namespace wfsim::sim
